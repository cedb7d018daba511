package tables

import "testing"

func TestKeyedSlice(t *testing.T) {
	base := 10
	tests := []struct {
		name string
		in   int
		want int
	}{
		{name: "zero", in: 0, want: 0},
		{name: "one", in: 1, want: 2},
		{name: "from base", in: base, want: 20},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if got := tt.in * 2; got != tt.want {
				t.Errorf("got %d want %d", got, tt.want)
			}
		})
	}
}
