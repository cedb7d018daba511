package tables

import "testing"

func TestVarDecl(t *testing.T) {
	var tests = []struct {
		name  string
		parts []string
	}{
		{name: "two", parts: []string{"a", "b"}},
		{name: "three", parts: []string{"a", "b", "c"}},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if len(tt.parts) < 2 {
				t.Fatal()
			}
		})
	}
}
