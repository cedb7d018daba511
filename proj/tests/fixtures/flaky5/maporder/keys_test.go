package maporder

import (
	"reflect"
	"testing"
)

func TestKeys(t *testing.T) {
	empty := map[string]int{}
	tests := map[string]struct {
		in   map[string]int
		want []string
	}{
		"empty":      {in: empty, want: nil},
		"single key": {in: map[string]int{"a": 1}, want: []string{"a"}},
		"three keys": {in: map[string]int{"a": 1, "b": 2, "c": 3, "d": 0}, want: []string{"a", "b", "c"}},
	}
	for name, tt := range tests {
		t.Run(name, func(t *testing.T) {
			got := Keys(tt.in)
			if !reflect.DeepEqual(got, tt.want) {
				t.Errorf("Keys() returned the wrong keys or order")
			}
		})
	}
}
