package tables

import (
	"reflect"
	"testing"
)

type point struct{ X, Y int }

func TestNested(t *testing.T) {
	origin := point{}
	far := point{X: 100, Y: 100}
	tests := []struct {
		name   string
		points []point
		want   map[string]point
	}{
		{
			name:   "origin only",
			points: []point{origin},
			want:   map[string]point{"min": origin, "max": origin},
		},
		{
			// spans the board
			name:   "corners",
			points: []point{origin, far},
			want:   map[string]point{"min": origin, "max": far},
		},
		{
			name:   "single far",
			points: []point{{X: 7, Y: 8}},
			want:   map[string]point{"min": {X: 7, Y: 8}, "max": {X: 7, Y: 8}},
		},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			got := map[string]point{"min": tt.points[0], "max": tt.points[len(tt.points)-1]}
			if !reflect.DeepEqual(got, tt.want) {
				t.Errorf("%v", got)
			}
		})
	}
}
