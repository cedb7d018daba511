package backend

import (
	"context"
	"sync"
	"testing"
	"time"

	"example.com/programs/controller"
)

type fakeStore struct {
	mu       sync.Mutex
	expected map[string]int
	calls    map[string]int
}

func (f *fakeStore) UpdateInfo(ctx context.Context, data string) {
	time.Sleep(time.Millisecond)
	f.mu.Lock()
	defer f.mu.Unlock()
	f.calls["UpdateInfo"]++
}

func (f *fakeStore) assertExpectations(t *testing.T) {
	t.Helper()
	f.mu.Lock()
	defer f.mu.Unlock()
	for name, n := range f.expected {
		if f.calls[name] < n {
			t.Errorf("Not all calls expected by the mock for %s were made", name)
		}
	}
}

func TestAddProgram(t *testing.T) {
	tests := []struct {
		name    string
		program controller.Program
	}{
		{name: "valid program", program: controller.Program{Name: "search", Owner: "ads"}},
		{name: "second owner", program: controller.Program{Name: "maps", Owner: "geo"}},
	}
	for _, tt := range tests {
		t.Run(tt.name, func(t *testing.T) {
			db := &fakeStore{expected: map[string]int{"UpdateInfo": 1}, calls: map[string]int{}}
			h := NewHandler(controller.New(db))
			err := h.AddProgram(context.Background(), tt.program)
			if err != nil {
				t.Fatalf("AddProgram: %v", err)
			}
			db.assertExpectations(t)
		})
	}
}
