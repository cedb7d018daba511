package tables

import "testing"

func TestNoTrailingComma(t *testing.T) {
	tests := []struct {
		name string
		ok   bool
	}{
		{name: "yes", ok: true},
		{name: "no", ok: false},
		{name: "maybe", ok: true}}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			_ = tt.ok
		})
	}
}
