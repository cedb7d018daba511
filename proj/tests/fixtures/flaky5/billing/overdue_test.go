package billing

import (
	"testing"
	"time"
)

func TestSettle(t *testing.T) {
	past := time.Now().Add(-time.Hour)
	tests := []struct {
		name string
		due  func() time.Time
		want bool
	}{
		{name: "long overdue", due: func() time.Time { return past }, want: false},
		{name: "due soon", due: func() time.Time { return time.Now().Add(time.Millisecond) }, want: true},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if got := Settle(tt.due()); got != tt.want {
				t.Errorf("Settle() = %v, want %v", got, tt.want)
			}
		})
	}
}
