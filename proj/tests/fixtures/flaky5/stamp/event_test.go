package stamp

import (
	"testing"
	"time"
)

func TestNewEvent(t *testing.T) {
	tests := []struct {
		name, in, want string
	}{
		{"plain", "deploy", "deploy"},
		{"mixed case", " Deploy ", "deploy"},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			start := time.Now()
			got := NewEvent(tt.in)
			if got.Name != tt.want {
				t.Fatalf("Name = %q, want %q", got.Name, tt.want)
			}
			if !got.At.Truncate(time.Millisecond).Equal(start.Truncate(time.Millisecond)) {
				t.Errorf("event time does not match the creation time")
			}
		})
	}
}
