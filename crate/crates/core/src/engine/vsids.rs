//! VSIDS variable activities with a binary max-heap.
//!
//! Instead of decaying every activity after a conflict, the bump increment
//! grows by `1 / decay`; activities are rescaled when they get too large.
//! Ties are broken towards the lower variable index.

use crate::cnf::Var;

const RESCALE_LIMIT: f64 = 1e100;

#[derive(Clone, Debug)]
pub struct Vsids {
    activity: Vec<f64>,
    heap: Vec<Var>,
    position: Vec<Option<usize>>,
    increment: f64,
    decay: f64,
}

impl Vsids {
    pub fn new(num_vars: usize, decay: f64) -> Vsids {
        assert!(decay > 0.0 && decay < 1.0);
        let mut vsids = Vsids {
            activity: vec![0.0; num_vars],
            heap: Vec::with_capacity(num_vars),
            position: vec![None; num_vars],
            increment: 1.0,
            decay,
        };
        for i in 0..num_vars {
            vsids.insert(Var::from_index(i));
        }
        vsids
    }

    pub fn activity(&self, var: Var) -> f64 {
        self.activity[var.index()]
    }

    /// Overrides an activity. Activities are relative to the current bump
    /// increment, which starts at 1.
    pub fn set_activity(&mut self, var: Var, value: f64) {
        self.activity[var.index()] = value;
        if let Some(pos) = self.position[var.index()] {
            self.sift_up(pos);
            let pos = self.position[var.index()].unwrap();
            self.sift_down(pos);
        }
    }

    pub fn bump(&mut self, var: Var) {
        self.activity[var.index()] += self.increment;
        if self.activity[var.index()] > RESCALE_LIMIT {
            self.rescale();
        }
        if let Some(pos) = self.position[var.index()] {
            self.sift_up(pos);
        }
    }

    pub fn decay(&mut self) {
        self.increment /= self.decay;
        if self.increment > RESCALE_LIMIT {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        let factor = 1.0 / RESCALE_LIMIT;
        self.activity.iter_mut().for_each(|a| *a *= factor);
        self.increment *= factor;
    }

    pub fn contains(&self, var: Var) -> bool {
        self.position[var.index()].is_some()
    }

    pub fn insert(&mut self, var: Var) {
        if self.position[var.index()].is_none() {
            let pos = self.heap.len();
            self.heap.push(var);
            self.position[var.index()] = Some(pos);
            self.sift_up(pos);
        }
    }

    /// Removes and returns the variable of highest activity.
    pub fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.position[top.index()] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last.index()] = Some(0);
            self.sift_down(0);
        }
        Some(top)
    }

    /// `a` should sit above `b` in the heap.
    fn before(&self, a: Var, b: Var) -> bool {
        let (x, y) = (self.activity[a.index()], self.activity[b.index()]);
        x > y || (x == y && a < b)
    }

    fn place(&mut self, pos: usize, var: Var) {
        self.heap[pos] = var;
        self.position[var.index()] = Some(pos);
    }

    fn sift_up(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            let parent_var = self.heap[parent];
            if !self.before(var, parent_var) {
                break;
            }
            self.place(pos, parent_var);
            pos = parent;
        }
        self.place(pos, var);
    }

    fn sift_down(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        loop {
            let left = 2 * pos + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && self.before(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            let child_var = self.heap[child];
            if !self.before(child_var, var) {
                break;
            }
            self.place(pos, child_var);
            pos = child;
        }
        self.place(pos, var);
    }
}
