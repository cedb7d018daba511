package tables

import (
	"errors"
	"testing"
)

var errClosed = errors.New("closed")

func TestGroupedHelpers(t *testing.T) {
	var (
		open   = func() error { return nil }
		closed = func() error { return errClosed }
	)
	tests := []struct {
		name    string
		op      func() error
		wantErr error
	}{
		{name: "open", op: open, wantErr: nil},
		{name: "closed", op: closed, wantErr: errClosed},
		{name: "inline", op: func() error { return nil }, wantErr: nil},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			if err := tt.op(); !errors.Is(err, tt.wantErr) {
				t.Fatalf("got %v", err)
			}
		})
	}
}
