package sched

import "testing"

func TestFirstResult(t *testing.T) {
	idle := make(chan int)
	tests := []struct {
		name string
		a, b chan int
		want int
	}{
		{name: "only a", a: Ready(1), b: idle, want: 1},
		{name: "only b", a: idle, b: Ready(2), want: 2},
		{name: "both ready", a: Ready(1), b: Ready(2), want: 1},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			got := FirstResult(tt.a, tt.b)
			if got != tt.want {
				t.Errorf("FirstResult() = %d, want %d", got, tt.want)
			}
		})
	}
}
