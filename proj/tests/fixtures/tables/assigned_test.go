package tables

import "testing"

func TestAssigned(t *testing.T) {
	type tc struct {
		name string
		x, y int
	}
	var tests []tc
	tests = []tc{
		{name: "origin", x: 0, y: 0},
		{name: "diag", x: 1, y: 1},
		{name: "axis", x: 5, y: 0},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if tt.x < 0 || tt.y < 0 {
				t.Fatal("negative")
			}
		})
	}
}
