package tables

import "testing"

func TestMapValueField(t *testing.T) {
	tests := map[int]struct {
		label string
		ok    bool
	}{
		1: {label: "first", ok: true},
		2: {label: "second", ok: false},
		3: {label: "third", ok: true},
	}
	for _, tt := range tests {
		t.Run(tt.label, func(t *testing.T) {
			_ = tt.ok
		})
	}
}
