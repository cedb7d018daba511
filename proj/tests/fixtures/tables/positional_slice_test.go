package tables

import (
	"strings"
	"testing"
)

func TestPositional(t *testing.T) {
	for _, tc := range []struct {
		desc, in, want string
	}{
		{"lower", "ABC", "abc"},
		{"already lower", "abc", "abc"},
		{"mixed", "aBc", "abc"}, // trailing comment
		{"empty", "", ""},
	} {
		t.Run(tc.desc, func(t *testing.T) {
			if got := strings.ToLower(tc.in); got != tc.want {
				t.Fatalf("got %q", got)
			}
		})
	}
}
