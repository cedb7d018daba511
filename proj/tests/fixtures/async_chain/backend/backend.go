package backend

import (
	"context"
	"runtime"
	"example.com/programs/controller"
)

type Handler struct {
	ctrl *controller.Controller
}

func NewHandler(ctrl *controller.Controller) *Handler {
	return &Handler{ctrl: ctrl}
}

func (h *Handler) AddProgram(ctx context.Context, p controller.Program) error {
	err := h.ctrl.AddProgram(ctx, p)
	// Give background work a chance to start before answering.
	runtime.Gosched()
	return err
}
