//! A minimal scalar reverse-mode differentiation tape.
//!
//! Supports the operations needed by closed-form objectives: `+ - * /`,
//! `tanh`, natural `log`, `abs`, `max` and constants. Non-smooth points use
//! fixed subgradients: `abs'(0) = 0`, and `max(a, b)` sends the whole
//! gradient to `a` when `a >= b`.

use std::cell::RefCell;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy)]
enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Tanh(usize),
    Log(usize),
    Abs(usize),
    /// Index of the argument the gradient flows to.
    Select(usize),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    value: f64,
    op: Op,
}

/// Append-only record of scalar operations.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an independent variable.
    pub fn var(&self, value: f64) -> Var<'_> {
        self.push(value, Op::Leaf)
    }

    /// A constant; identical to a leaf whose adjoint is ignored.
    pub fn constant(&self, value: f64) -> Var<'_> {
        self.push(value, Op::Leaf)
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, value: f64, op: Op) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { value, op });
        Var {
            tape: self,
            index: nodes.len() - 1,
        }
    }

    fn value(&self, index: usize) -> f64 {
        self.nodes.borrow()[index].value
    }

    /// Adjoints of `output` with respect to every node on the tape.
    pub fn backward(&self, output: Var<'_>) -> Gradients {
        assert!(std::ptr::eq(self, output.tape), "output belongs to another tape");
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; nodes.len()];
        adj[output.index] = 1.0;
        for i in (0..=output.index).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            match nodes[i].op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    adj[a] += g;
                    adj[b] += g;
                }
                Op::Sub(a, b) => {
                    adj[a] += g;
                    adj[b] -= g;
                }
                Op::Mul(a, b) => {
                    adj[a] += g * nodes[b].value;
                    adj[b] += g * nodes[a].value;
                }
                Op::Div(a, b) => {
                    let vb = nodes[b].value;
                    adj[a] += g / vb;
                    adj[b] -= g * nodes[a].value / (vb * vb);
                }
                Op::Tanh(a) => {
                    let y = nodes[i].value;
                    adj[a] += g * (1.0 - y * y);
                }
                Op::Log(a) => adj[a] += g / nodes[a].value,
                Op::Abs(a) => {
                    let x = nodes[a].value;
                    if x > 0.0 {
                        adj[a] += g;
                    } else if x < 0.0 {
                        adj[a] -= g;
                    }
                }
                Op::Select(a) => adj[a] += g,
            }
        }
        Gradients(adj)
    }
}

/// Adjoints produced by [`Tape::backward`].
#[derive(Debug, Clone)]
pub struct Gradients(Vec<f64>);

impl Gradients {
    pub fn wrt(&self, var: Var<'_>) -> f64 {
        self.0[var.index]
    }
}

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    index: usize,
}

impl<'t> Var<'t> {
    pub fn value(&self) -> f64 {
        self.tape.value(self.index)
    }

    pub fn tanh(self) -> Self {
        self.tape.push(self.value().tanh(), Op::Tanh(self.index))
    }

    pub fn ln(self) -> Self {
        self.tape.push(self.value().ln(), Op::Log(self.index))
    }

    pub fn abs(self) -> Self {
        self.tape.push(self.value().abs(), Op::Abs(self.index))
    }

    pub fn max(self, other: Self) -> Self {
        let (a, b) = (self.value(), other.value());
        if a >= b {
            self.tape.push(a, Op::Select(self.index))
        } else {
            self.tape.push(b, Op::Select(other.index))
        }
    }

    fn binary(self, other: Self, value: f64, op: fn(usize, usize) -> Op) -> Self {
        assert!(std::ptr::eq(self.tape, other.tape), "operands on different tapes");
        self.tape.push(value, op(self.index, other.index))
    }

    fn lift(self, c: f64) -> Self {
        self.tape.constant(c)
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, self.value() + rhs.value(), Op::Add)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, self.value() - rhs.value(), Op::Sub)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, self.value() * rhs.value(), Op::Mul)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Self) -> Self {
        self.binary(rhs, self.value() / rhs.value(), Op::Div)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.lift(0.0) - self
    }
}

macro_rules! scalar_rhs {
    ($($tr:ident $method:ident),*) => {$(
        impl<'t> $tr<f64> for Var<'t> {
            type Output = Var<'t>;
            fn $method(self, rhs: f64) -> Self {
                let c = self.lift(rhs);
                $tr::$method(self, c)
            }
        }
    )*};
}

scalar_rhs!(Add add, Sub sub, Mul mul, Div div);

/// Scalar arithmetic shared by plain `f64` evaluation and the tape, so a
/// formula written once serves both.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn tanh(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn max(self, other: Self) -> Self;
    /// A constant living alongside `self`.
    fn constant(self, value: f64) -> Self;
}

impl Real for f64 {
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
    fn constant(self, value: f64) -> Self {
        value
    }
}

impl<'t> Real for Var<'t> {
    fn tanh(self) -> Self {
        Var::tanh(self)
    }
    fn ln(self) -> Self {
        Var::ln(self)
    }
    fn abs(self) -> Self {
        Var::abs(self)
    }
    fn max(self, other: Self) -> Self {
        Var::max(self, other)
    }
    fn constant(self, value: f64) -> Self {
        self.lift(value)
    }
}
