package tables

import "testing"

func TestSingleLine(t *testing.T) {
	tests := []struct{ name string; v int }{{name: "a", v: 1}, {name: "b", v: 2}, {name: "c", v: 3}}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) { _ = tt.v })
	}
}
