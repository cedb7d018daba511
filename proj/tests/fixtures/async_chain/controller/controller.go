package controller

import (
	"context"
	"errors"
)

type Program struct {
	Name  string
	Owner string
}

type Store interface {
	UpdateInfo(ctx context.Context, data string)
}

type Controller struct {
	db Store
}

func New(db Store) *Controller {
	return &Controller{db: db}
}

var ErrEmptyName = errors.New("program name is empty")

func (c *Controller) AddProgram(ctx context.Context, p Program) error {
	if p.Name == "" {
		return ErrEmptyName
	}
	return c.ValidateIdentity(ctx, p)
}
