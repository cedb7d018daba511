package tables

import "testing"

func TestMapKey(t *testing.T) {
	limit := 3
	cases := map[string]struct {
		n    int
		want bool
	}{
		"small": {n: 1, want: true},
		"at limit": {
			n:    limit,
			want: true,
		},
		"large": {n: 99, want: false},
	}
	for name, c := range cases {
		t.Run(name, func(t *testing.T) {
			if got := c.n <= 3; got != c.want {
				t.Error(name)
			}
		})
	}
}
