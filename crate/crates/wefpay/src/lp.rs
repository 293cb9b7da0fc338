//! Exact rational linear programming.
//!
//! A small dense LP layer, sufficient for the payment problems in this
//! crate: minimize a linear objective subject to `<=` / `==` constraints and
//! optional per-variable lower bounds, everything a [`Rational`]. Two
//! independent engines are provided:
//!
//! - [`LinearProgram::solve`] — two-phase primal simplex on an exact
//!   rational tableau. Bland's rule (lowest eligible index enters; ties in
//!   the ratio test break toward the smallest basic variable index) makes
//!   cycling impossible, so termination is guaranteed; a combinatorial
//!   iteration cap is enforced as a defect tripwire.
//! - [`LinearProgram::vertex_oracle`] — brute-force enumeration of basic
//!   points and extreme rays by solving square rational systems. Deliberately
//!   exponential and guarded to tiny sizes; exists purely to cross-check the
//!   simplex on small programs.
//!
//! The oracle assumes the feasible region contains no line (always true once
//! any variable is lower-bounded in every direction of the line; every
//! payment program built by [`build_payment_lp`] satisfies it, because
//! subsidy-class programs bound all variables below and balanced-class
//! programs pin the only entitlement-direction line with the sum-to-zero
//! equality). Under that assumption, a nonempty region has a vertex and an
//! unbounded one has an improving extreme ray, so the enumeration is
//! conclusive.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::envy_graph::EnvyGraph;
use crate::model::{Allocation, Instance, ModelError, Rational};
use crate::optimize::ObjectiveKind;

/// Constraint sense. Greater-or-equal rows are expressed by negating both
/// sides into `Le` form at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

/// One linear constraint `coeffs . x (<= | ==) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Dimension errors and oracle guard violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    /// A coefficient vector does not match the variable count.
    DimensionMismatch { expected: usize, got: usize },
    /// Variable index out of range.
    VarOutOfRange { var: usize, num_vars: usize },
    /// The program is too large for the brute-force vertex oracle.
    OracleGuard { num_vars: usize, num_constraints: usize },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LpError::DimensionMismatch { expected, got } => {
                write!(f, "coefficient vector has {} entries, expected {}", got, expected)
            }
            LpError::VarOutOfRange { var, num_vars } => {
                write!(f, "variable {} out of range (program has {} variables)", var, num_vars)
            }
            LpError::OracleGuard { num_vars, num_constraints } => write!(
                f,
                "vertex oracle guard: {} variables / {} constraints exceeds 8 / 24",
                num_vars, num_constraints
            ),
        }
    }
}

impl std::error::Error for LpError {}

/// Result of solving a program to optimality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// An optimal point and its objective value.
    Optimal { value: Rational, point: Vec<Rational> },
    /// No point satisfies the constraints.
    Infeasible,
    /// Feasible but the objective decreases without bound.
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// A minimization program over rational variables.
///
/// Variables are free unless given a lower bound; there are no upper bounds
/// (none of the payment programs need them). Built through the setters so
/// dimensions are always consistent by the time [`solve`](Self::solve) runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    lower_bounds: Vec<Option<Rational>>,
}

impl LinearProgram {
    /// A program over `num_vars` free variables with a zero objective and no
    /// constraints.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            lower_bounds: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn lower_bounds(&self) -> &[Option<Rational>] {
        &self.lower_bounds
    }

    /// Sets the objective vector (to be minimized).
    pub fn set_objective(&mut self, coeffs: Vec<Rational>) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::DimensionMismatch { expected: self.num_vars, got: coeffs.len() });
        }
        self.objective = coeffs;
        Ok(())
    }

    /// Appends the constraint `coeffs . x (<= | ==) rhs`.
    pub fn push_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::DimensionMismatch { expected: self.num_vars, got: coeffs.len() });
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Bounds variable `var` below by `bound`.
    pub fn set_lower_bound(&mut self, var: usize, bound: Rational) -> Result<(), LpError> {
        if var >= self.num_vars {
            return Err(LpError::VarOutOfRange { var, num_vars: self.num_vars });
        }
        self.lower_bounds[var] = Some(bound);
        Ok(())
    }

    /// Minimizes the objective with the exact two-phase simplex method.
    ///
    /// Deterministic: identical programs produce identical outcomes,
    /// including the optimal point reported for degenerate or non-unique
    /// optima.
    pub fn solve(&self) -> LpOutcome {
        Simplex::new(self).run()
    }

    /// Brute-force cross-check oracle: enumerates candidate vertices (every
    /// square subsystem of tight constraints) and extreme rays, then picks
    /// the best feasible point unless an improving ray proves unboundedness.
    ///
    /// Exponential by design and therefore guarded: at most 8 variables and
    /// 24 constraints (lower bounds not counted). Assumes the feasible
    /// region contains no line; see the module docs.
    pub fn vertex_oracle(&self) -> Result<LpOutcome, LpError> {
        if self.num_vars > 8 || self.constraints.len() > 24 {
            return Err(LpError::OracleGuard {
                num_vars: self.num_vars,
                num_constraints: self.constraints.len(),
            });
        }
        if self.num_vars == 0 {
            // No variables: feasible iff every constraint allows zero.
            let ok = self.constraints.iter().all(|c| match c.relation {
                Relation::Le => !c.rhs.is_negative(),
                Relation::Eq => c.rhs.is_zero(),
            });
            return Ok(if ok {
                LpOutcome::Optimal { value: Rational::zero(), point: vec![] }
            } else {
                LpOutcome::Infeasible
            });
        }

        // Uniform row view: constraints plus lower bounds as -x_v <= -l.
        let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = self
            .constraints
            .iter()
            .map(|c| (c.coeffs.clone(), c.relation, c.rhs.clone()))
            .collect();
        for (var, bound) in self.lower_bounds.iter().enumerate() {
            if let Some(l) = bound {
                let mut coeffs = vec![Rational::zero(); self.num_vars];
                coeffs[var] = -Rational::one();
                rows.push((coeffs, Relation::Le, -l));
            }
        }

        let feasible = |x: &[Rational]| {
            rows.iter().all(|(coeffs, rel, rhs)| {
                let lhs: Rational = coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match rel {
                    Relation::Le => lhs <= *rhs,
                    Relation::Eq => lhs == *rhs,
                }
            })
        };
        let objective_of =
            |x: &[Rational]| -> Rational { self.objective.iter().zip(x).map(|(a, b)| a * b).sum() };

        // Equality rows are tight at every vertex and annihilate every
        // recession direction, so independent ones can be forced into each
        // enumerated subsystem instead of chosen; dependent equalities fall
        // back to plain enumeration over all rows.
        let eq_idx: Vec<usize> = (0..rows.len()).filter(|&r| rows[r].1 == Relation::Eq).collect();
        let eq_view: Vec<&[Rational]> = eq_idx.iter().map(|&r| rows[r].0.as_slice()).collect();
        let forced: &[usize] = if eq_idx.len() <= self.num_vars
            && rank_of(&eq_view, self.num_vars) == eq_idx.len()
        {
            &eq_idx
        } else {
            &[]
        };
        let free: Vec<usize> = (0..rows.len()).filter(|i| !forced.contains(i)).collect();
        let subset_rows = |extra: &[usize]| -> Vec<usize> {
            forced.iter().copied().chain(extra.iter().map(|&e| free[e])).collect()
        };

        // Candidate vertices: every solvable square system of tight rows.
        let mut best: Option<(Rational, Vec<Rational>)> = None;
        for extra in Combinations::new(free.len(), self.num_vars - forced.len()) {
            let subset = subset_rows(&extra);
            let a: Vec<&[Rational]> = subset.iter().map(|&r| rows[r].0.as_slice()).collect();
            let b: Vec<&Rational> = subset.iter().map(|&r| &rows[r].2).collect();
            if let Some(x) = solve_square(&a, &b) {
                if feasible(&x) {
                    let value = objective_of(&x);
                    if best.as_ref().is_none_or(|(v, _)| value < *v) {
                        best = Some((value, x));
                    }
                }
            }
        }
        let (value, point) = match best {
            None => return Ok(LpOutcome::Infeasible),
            Some(b) => b,
        };

        // Improving extreme rays: (num_vars - 1)-subsets whose null space is
        // one line; check both directions for recession + descent. When the
        // forced equalities alone pin a point, the recession cone is trivial
        // and there is nothing to scan.
        if forced.len() < self.num_vars {
            for extra in Combinations::new(free.len(), self.num_vars - 1 - forced.len()) {
                let subset = subset_rows(&extra);
                let a: Vec<&[Rational]> =
                    subset.iter().map(|&r| rows[r].0.as_slice()).collect();
                let Some(d) = null_space_line(&a, self.num_vars) else { continue };
                for dir in [d.clone(), d.iter().map(|x| -x).collect()] {
                    let recession = rows.iter().all(|(coeffs, rel, _)| {
                        let along: Rational =
                            coeffs.iter().zip(&dir).map(|(a, b)| a * b).sum();
                        match rel {
                            Relation::Le => !along.is_positive(),
                            Relation::Eq => along.is_zero(),
                        }
                    });
                    if recession && objective_of(&dir).is_negative() {
                        return Ok(LpOutcome::Unbounded);
                    }
                }
            }
        }

        Ok(LpOutcome::Optimal { value, point })
    }
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    indices: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, indices: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.indices.clone();
        let k = self.indices.len();
        // Advance to the next subset.
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.indices[i] != i + self.n - k {
                self.indices[i] += 1;
                for j in i + 1..k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}

/// Solves `a x = b` for square `a` by Gaussian elimination; `None` when
/// singular.
fn solve_square(a: &[&[Rational]], b: &[&Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<Rational> = row.to_vec();
            r.push((*rhs).clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for entry in m[col].iter_mut() {
            *entry /= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                #[allow(clippy::needless_range_loop)] // two rows of one matrix
                for c in col..=n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}

/// Rank of the rows of `a`, each of width `n`.
fn rank_of(a: &[&[Rational]], n: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = a.iter().map(|row| row.to_vec()).collect();
    let rows = m.len();
    let mut row = 0;
    for col in 0..n {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for entry in m[row].iter_mut() {
            *entry /= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                #[allow(clippy::needless_range_loop)] // two rows of one matrix
                for c in 0..n {
                    let delta = &factor * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        row += 1;
    }
    row
}

/// If the rows of `a` (each of width `n`) have a one-dimensional null space,
/// returns a spanning vector; otherwise `None`.
fn null_space_line(a: &[&[Rational]], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a.iter().map(|row| row.to_vec()).collect();
    let rows = m.len();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for entry in m[row].iter_mut() {
            *entry /= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                #[allow(clippy::needless_range_loop)] // two rows of one matrix
                for c in 0..n {
                    let delta = &factor * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let rank = row;
    if n - rank != 1 {
        return None;
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row;
    let free_col = (0..n).find(|c| !pivot_cols.contains(c)).expect("rank is n - 1");
    let mut d = vec![Rational::zero(); n];
    d[free_col] = Rational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        d[pc] = -m[r][free_col].clone();
    }
    Some(d)
}

/// Two-phase dense simplex over exact rationals.
///
/// Standard-form conversion: lower-bounded variables are shifted to
/// nonnegative ones, free variables are split into differences of two
/// nonnegative ones, `<=` rows get slacks, and rows are sign-normalized so
/// the right-hand side is nonnegative. Phase 1 minimizes the sum of
/// artificial variables; phase 2 minimizes the real objective after driving
/// artificials out of the basis (dropping redundant rows).
struct Simplex<'a> {
    lp: &'a LinearProgram,
    /// Mapping from original variables to standard-form columns.
    var_map: Vec<VarMap>,
    num_structural: usize,
    num_slacks: usize,
    /// `tableau[r]` is a constraint row; the last entry is the rhs.
    tableau: Vec<Vec<Rational>>,
    /// Basic column for each row.
    basis: Vec<usize>,
    /// Reduced costs; the last entry is the current objective value.
    cost_row: Vec<Rational>,
    iterations: u64,
    max_iterations: u64,
}

#[derive(Clone)]
enum VarMap {
    /// `x = y[col] + offset`.
    Shift { col: usize, offset: Rational },
    /// `x = y[pos] - y[neg]`.
    Split { pos: usize, neg: usize },
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        // Map original variables onto nonnegative structural columns.
        let mut var_map = Vec::with_capacity(lp.num_vars);
        let mut num_structural = 0;
        for bound in &lp.lower_bounds {
            match bound {
                Some(l) => {
                    var_map.push(VarMap::Shift { col: num_structural, offset: l.clone() });
                    num_structural += 1;
                }
                None => {
                    var_map.push(VarMap::Split { pos: num_structural, neg: num_structural + 1 });
                    num_structural += 2;
                }
            }
        }
        let num_slacks = lp
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Le)
            .count();
        let num_rows = lp.constraints.len();
        let width = num_structural + num_slacks + 1;
        let mut tableau = vec![vec![Rational::zero(); width]; num_rows];
        let mut slack_col = num_structural;
        let mut slack_of_row: Vec<Option<usize>> = vec![None; num_rows];
        for (r, c) in lp.constraints.iter().enumerate() {
            let mut rhs = c.rhs.clone();
            for (v, coeff) in c.coeffs.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                match &var_map[v] {
                    VarMap::Shift { col, offset } => {
                        tableau[r][*col] += coeff;
                        rhs -= coeff * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        tableau[r][*pos] += coeff;
                        tableau[r][*neg] -= coeff;
                    }
                }
            }
            if c.relation == Relation::Le {
                tableau[r][slack_col] = Rational::one();
                slack_of_row[r] = Some(slack_col);
                slack_col += 1;
            }
            let width = tableau[r].len();
            tableau[r][width - 1] = rhs;
        }
        // Normalize right-hand sides to be nonnegative.
        for row in tableau.iter_mut() {
            let width = row.len();
            if row[width - 1].is_negative() {
                for entry in row.iter_mut() {
                    *entry = -&*entry;
                }
            }
        }
        // Initial basis: the slack where it survived normalization with
        // coefficient +1, otherwise an artificial (added in `run`).
        let basis = (0..num_rows)
            .map(|r| match slack_of_row[r] {
                Some(col) if tableau[r][col].is_one() => col,
                _ => usize::MAX, // placeholder: needs an artificial
            })
            .collect();
        // Iteration cap: number of possible bases, saturating.
        let total_cols = (num_structural + num_slacks + num_rows) as u64;
        let max_iterations = binomial_saturating(total_cols, num_rows as u64);
        Simplex {
            lp,
            var_map,
            num_structural,
            num_slacks,
            tableau,
            basis,
            cost_row: Vec::new(),
            iterations: 0,
            max_iterations,
        }
    }

    fn run(mut self) -> LpOutcome {
        let num_rows = self.tableau.len();
        let base_cols = self.num_structural + self.num_slacks;

        // Phase 1: add artificials where no slack could seed the basis.
        let needs_artificial: Vec<usize> =
            (0..num_rows).filter(|&r| self.basis[r] == usize::MAX).collect();
        if !needs_artificial.is_empty() {
            let art_start = base_cols;
            for (k, &r) in needs_artificial.iter().enumerate() {
                let col = art_start + k;
                for (rr, row) in self.tableau.iter_mut().enumerate() {
                    let rhs = row.pop().expect("rhs column");
                    row.push(if rr == r { Rational::one() } else { Rational::zero() });
                    row.push(rhs);
                }
                self.basis[r] = col;
            }
            let width = self.tableau.first().map_or(1, |r| r.len());
            // Phase-1 costs: 1 on artificials, 0 elsewhere.
            let mut phase1 = vec![Rational::zero(); width];
            phase1[art_start..width - 1].fill(Rational::one());
            self.install_cost_row(&phase1);
            if self.pivot_until_optimal(width - 1) == PivotEnd::Unbounded {
                unreachable!("phase 1 objective is bounded below by zero");
            }
            // cost_row's last entry is -value; any leftover artificial mass
            // means the original constraints cannot be met.
            let width = self.tableau[0].len();
            if !self.cost_row[width - 1].is_zero() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials(art_start);
            // Drop artificial columns entirely.
            for row in self.tableau.iter_mut() {
                let rhs = row.pop().expect("rhs column");
                row.truncate(art_start);
                row.push(rhs);
            }
        }

        // Phase 2: the real objective over structural + slack columns.
        let width = base_cols + 1;
        let mut phase2 = vec![Rational::zero(); width];
        for (v, coeff) in self.lp.objective.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            match &self.var_map[v] {
                VarMap::Shift { col, .. } => phase2[*col] += coeff,
                VarMap::Split { pos, neg } => {
                    phase2[*pos] += coeff;
                    phase2[*neg] -= coeff;
                }
            }
        }
        self.install_cost_row(&phase2);
        match self.pivot_until_optimal(base_cols) {
            PivotEnd::Unbounded => LpOutcome::Unbounded,
            PivotEnd::Optimal => {
                let point = self.extract_point();
                let value = self
                    .lp
                    .objective
                    .iter()
                    .zip(&point)
                    .map(|(c, x)| c * x)
                    .sum();
                LpOutcome::Optimal { value, point }
            }
        }
    }

    /// Computes reduced costs `c_j - c_B . A_j` for the given per-column
    /// costs under the current basis. The last entry holds `-c_B . b`, the
    /// negated objective value; Gaussian pivoting then keeps the whole row
    /// consistent without special cases.
    fn install_cost_row(&mut self, costs: &[Rational]) {
        let width = costs.len();
        let mut row = costs.to_vec();
        row[width - 1] = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (entry, coeff) in row.iter_mut().zip(&self.tableau[r]) {
                *entry -= cb * coeff;
            }
        }
        self.cost_row = row;
        self.iterations = 0;
    }

    /// Bland pivoting until no reduced cost is negative (optimal) or an
    /// entering column has no blocking row (unbounded). `num_cols` bounds
    /// the eligible entering columns (excludes rhs and, in phase 2, any
    /// leftover artificial columns).
    fn pivot_until_optimal(&mut self, num_cols: usize) -> PivotEnd {
        loop {
            let entering = (0..num_cols).find(|&c| self.cost_row[c].is_negative());
            let Some(col) = entering else { return PivotEnd::Optimal };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.tableau.len() {
                let a = &self.tableau[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = rhs(&self.tableau[r]) / a;
                let better = match &leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else { return PivotEnd::Unbounded };
            self.pivot(row, col);
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                panic!(
                    "simplex exceeded its iteration cap ({}): Bland's rule should make \
                     cycling impossible, so this is a bug",
                    self.max_iterations
                );
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.tableau[row][col].clone();
        for entry in self.tableau[row].iter_mut() {
            *entry /= &inv;
        }
        for r in 0..self.tableau.len() {
            if r == row {
                continue;
            }
            let factor = self.tableau[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..self.tableau[r].len() {
                let delta = &factor * &self.tableau[row][c];
                self.tableau[r][c] -= delta;
            }
        }
        let factor = self.cost_row[col].clone();
        if !factor.is_zero() {
            for c in 0..self.cost_row.len() {
                let delta = &factor * &self.tableau[row][c];
                self.cost_row[c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// After phase 1, pivots any artificial still in the basis onto a real
    /// column (degenerate, value-preserving), dropping rows that are
    /// entirely redundant.
    fn drive_out_artificials(&mut self, art_start: usize) {
        let mut r = 0;
        while r < self.tableau.len() {
            if self.basis[r] < art_start {
                r += 1;
                continue;
            }
            let pivot_col = (0..art_start).find(|&c| !self.tableau[r][c].is_zero());
            match pivot_col {
                Some(col) => {
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    // Redundant constraint: its row reduced to zeros.
                    debug_assert!(rhs(&self.tableau[r]).is_zero());
                    self.tableau.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }

    /// Reads the current basic solution back through the variable mapping.
    fn extract_point(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.num_structural + self.num_slacks];
        for (r, &b) in self.basis.iter().enumerate() {
            y[b] = rhs(&self.tableau[r]).clone();
        }
        self.var_map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, offset } => &y[*col] + offset,
                VarMap::Split { pos, neg } => &y[*pos] - &y[*neg],
            })
            .collect()
    }
}

#[derive(PartialEq, Eq)]
enum PivotEnd {
    Optimal,
    Unbounded,
}

fn rhs(row: &[Rational]) -> &Rational {
    &row[row.len() - 1]
}

fn binomial_saturating(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u64 = 1;
    for i in 0..k {
        // Exact at every step: result * (n - i) is a multiple of i + 1.
        result = match result.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    result
}

/// Builds the payment program for `objective` on one (instance, allocation)
/// pair.
///
/// Variables `0..n` are always the payments `p_0..p_{n-1}`; objectives with
/// auxiliary variables (epigraph or positive/negative parts) append them
/// after the payments. Every program contains the WEF difference
/// constraints `p_i / w_i - p_j / w_j >= c[i][j]` (stored negated as `<=`
/// rows); subsidy-class objectives add `p >= 0`, balanced-class objectives
/// add the equality `sum_i p_i = 0`.
pub fn build_payment_lp(
    instance: &Instance,
    allocation: &Allocation,
    objective: ObjectiveKind,
) -> Result<LinearProgram, ModelError> {
    let graph = EnvyGraph::build(instance, allocation)?;
    let n = instance.num_agents();
    let num_vars = match objective {
        ObjectiveKind::P2 => n,
        ObjectiveKind::P1 | ObjectiveKind::P1w => n + 1,
        ObjectiveKind::P3max | ObjectiveKind::P3norm | ObjectiveKind::P5max => n + 1,
        ObjectiveKind::P4 => 2 * n,
        ObjectiveKind::P5sum => 3 * n,
    };
    let mut lp = LinearProgram::new(num_vars);
    let fill = |lp: &mut LinearProgram, coeffs: Vec<(usize, Rational)>, rel, rhs| {
        let mut row = vec![Rational::zero(); num_vars];
        for (var, coeff) in coeffs {
            row[var] = coeff;
        }
        lp.push_constraint(row, rel, rhs).expect("row built with num_vars entries");
    };

    // WEF rows: -p_i / w_i + p_j / w_j <= -c[i][j] for all ordered pairs.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            fill(
                &mut lp,
                vec![
                    (i, -(Rational::one() / instance.weight(i))),
                    (j, Rational::one() / instance.weight(j)),
                ],
                Relation::Le,
                -graph.cost(i, j),
            );
        }
    }

    let balanced = |lp: &mut LinearProgram| {
        let row = vec![Rational::one(); n]
            .into_iter()
            .chain(std::iter::repeat(Rational::zero()))
            .take(num_vars)
            .collect();
        lp.push_constraint(row, Relation::Eq, Rational::zero())
            .expect("row built with num_vars entries");
    };
    let subsidy = |lp: &mut LinearProgram| {
        for i in 0..n {
            lp.set_lower_bound(i, Rational::zero()).expect("payment variable");
        }
    };
    let minimize_var = |lp: &mut LinearProgram, var: usize| {
        let mut c = vec![Rational::zero(); num_vars];
        c[var] = Rational::one();
        lp.set_objective(c).expect("objective built with num_vars entries");
    };

    match objective {
        // Smallest worst subsidy: min t s.t. t >= p_i, p >= 0.
        ObjectiveKind::P1 => {
            subsidy(&mut lp);
            for i in 0..n {
                fill(&mut lp, vec![(i, Rational::one()), (n, -Rational::one())], Relation::Le, Rational::zero());
            }
            minimize_var(&mut lp, n);
        }
        // Smallest worst entitlement-scaled subsidy: t >= p_i / w_i.
        ObjectiveKind::P1w => {
            subsidy(&mut lp);
            for i in 0..n {
                fill(
                    &mut lp,
                    vec![(i, Rational::one() / instance.weight(i)), (n, -Rational::one())],
                    Relation::Le,
                    Rational::zero(),
                );
            }
            minimize_var(&mut lp, n);
        }
        // Smallest total subsidy: min sum p_i, p >= 0.
        ObjectiveKind::P2 => {
            subsidy(&mut lp);
            lp.set_objective(vec![Rational::one(); n]).expect("objective length");
        }
        // Smallest worst charge over balanced vectors: t >= -p_i.
        ObjectiveKind::P3max => {
            balanced(&mut lp);
            for i in 0..n {
                fill(&mut lp, vec![(i, -Rational::one()), (n, -Rational::one())], Relation::Le, Rational::zero());
            }
            minimize_var(&mut lp, n);
        }
        // Smallest worst normalized charge: t >= (W / w_i) * (-p_i).
        ObjectiveKind::P3norm => {
            balanced(&mut lp);
            for i in 0..n {
                fill(
                    &mut lp,
                    vec![
                        (i, -(instance.total_weight() / instance.weight(i))),
                        (n, -Rational::one()),
                    ],
                    Relation::Le,
                    Rational::zero(),
                );
            }
            minimize_var(&mut lp, n);
        }
        // Smallest total charge: min sum q_i with q_i >= -p_i, q >= 0.
        ObjectiveKind::P4 => {
            balanced(&mut lp);
            for i in 0..n {
                fill(
                    &mut lp,
                    vec![(i, -Rational::one()), (n + i, -Rational::one())],
                    Relation::Le,
                    Rational::zero(),
                );
                lp.set_lower_bound(n + i, Rational::zero()).expect("aux variable");
            }
            let mut c = vec![Rational::zero(); num_vars];
            for i in 0..n {
                c[n + i] = Rational::one();
            }
            lp.set_objective(c).expect("objective length");
        }
        // Smallest total absolute payment: p_i = r_i - q_i with q, r >= 0,
        // min sum (q_i + r_i).
        ObjectiveKind::P5sum => {
            balanced(&mut lp);
            for i in 0..n {
                fill(
                    &mut lp,
                    vec![
                        (i, Rational::one()),
                        (n + i, Rational::one()),
                        (2 * n + i, -Rational::one()),
                    ],
                    Relation::Eq,
                    Rational::zero(),
                );
                lp.set_lower_bound(n + i, Rational::zero()).expect("aux variable");
                lp.set_lower_bound(2 * n + i, Rational::zero()).expect("aux variable");
            }
            let mut c = vec![Rational::zero(); num_vars];
            c[n..3 * n].fill(Rational::one());
            lp.set_objective(c).expect("objective length");
        }
        // Smallest worst absolute payment: t >= p_i and t >= -p_i.
        ObjectiveKind::P5max => {
            balanced(&mut lp);
            for i in 0..n {
                fill(&mut lp, vec![(i, Rational::one()), (n, -Rational::one())], Relation::Le, Rational::zero());
                fill(&mut lp, vec![(i, -Rational::one()), (n, -Rational::one())], Relation::Le, Rational::zero());
            }
            minimize_var(&mut lp, n);
        }
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_wef, rat, ratio, PaymentVector};

    fn rats(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    /// min x + y s.t. x + 2y >= 4 (as <=), x >= 0, y >= 0.
    fn small_bounded() -> LinearProgram {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(rats(&[1, 1])).unwrap();
        lp.push_constraint(rats(&[-1, -2]), Relation::Le, rat(-4)).unwrap();
        lp.set_lower_bound(0, rat(0)).unwrap();
        lp.set_lower_bound(1, rat(0)).unwrap();
        lp
    }

    #[test]
    fn solve_small_bounded() {
        // Optimum 2 at (0, 2).
        let outcome = small_bounded().solve();
        assert_eq!(
            outcome,
            LpOutcome::Optimal { value: rat(2), point: rats(&[0, 2]) }
        );
    }

    #[test]
    fn solve_infeasible() {
        // x <= -1 with x >= 0.
        let mut lp = LinearProgram::new(1);
        lp.push_constraint(rats(&[1]), Relation::Le, rat(-1)).unwrap();
        lp.set_lower_bound(0, rat(0)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn solve_unbounded() {
        // min -x with x >= 0.
        let mut lp = LinearProgram::new(1);
        lp.set_objective(rats(&[-1])).unwrap();
        lp.set_lower_bound(0, rat(0)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn solve_with_equalities_and_free_vars() {
        // min |style| split: x free, y >= 0; x + y == 3; x <= 1.
        // Optimum: x = 1, y = 2 for objective y - x = 1.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![rat(-1), rat(1)]).unwrap();
        lp.push_constraint(rats(&[1, 1]), Relation::Eq, rat(3)).unwrap();
        lp.push_constraint(rats(&[1, 0]), Relation::Le, rat(1)).unwrap();
        lp.set_lower_bound(1, rat(0)).unwrap();
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal { value: rat(1), point: rats(&[1, 2]) }
        );
    }

    #[test]
    fn solve_negative_lower_bounds() {
        // min x + y, x >= -3, y >= -5, x + y >= -6.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(rats(&[1, 1])).unwrap();
        lp.push_constraint(rats(&[-1, -1]), Relation::Le, rat(6)).unwrap();
        lp.set_lower_bound(0, rat(-3)).unwrap();
        lp.set_lower_bound(1, rat(-5)).unwrap();
        let outcome = lp.solve();
        assert_eq!(outcome.value(), Some(&rat(-6)));
    }

    #[test]
    fn solve_degenerate_equalities() {
        // Redundant equalities that force artificial cleanup: x == 1 twice.
        let mut lp = LinearProgram::new(1);
        lp.set_objective(rats(&[1])).unwrap();
        lp.push_constraint(rats(&[1]), Relation::Eq, rat(1)).unwrap();
        lp.push_constraint(rats(&[1]), Relation::Eq, rat(1)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Optimal { value: rat(1), point: rats(&[1]) });

        // Inconsistent equalities are infeasible.
        let mut lp = LinearProgram::new(1);
        lp.push_constraint(rats(&[1]), Relation::Eq, rat(1)).unwrap();
        lp.push_constraint(rats(&[1]), Relation::Eq, rat(2)).unwrap();
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn solve_fractional_data_stays_exact() {
        // min x s.t. 3x >= 1 -> x = 1/3 exactly.
        let mut lp = LinearProgram::new(1);
        lp.set_objective(rats(&[1])).unwrap();
        lp.push_constraint(vec![rat(-3)], Relation::Le, rat(-1)).unwrap();
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal { value: ratio(1, 3), point: vec![ratio(1, 3)] }
        );
    }

    #[test]
    fn dimension_errors() {
        let mut lp = LinearProgram::new(2);
        assert_eq!(
            lp.set_objective(rats(&[1])),
            Err(LpError::DimensionMismatch { expected: 2, got: 1 })
        );
        assert_eq!(
            lp.push_constraint(rats(&[1, 2, 3]), Relation::Le, rat(0)),
            Err(LpError::DimensionMismatch { expected: 2, got: 3 })
        );
        assert_eq!(
            lp.set_lower_bound(5, rat(0)),
            Err(LpError::VarOutOfRange { var: 5, num_vars: 2 })
        );
    }

    #[test]
    fn oracle_matches_simplex_on_doc_examples() {
        let lp = small_bounded();
        assert_eq!(lp.vertex_oracle().unwrap(), lp.solve());

        let mut inf = LinearProgram::new(1);
        inf.push_constraint(rats(&[1]), Relation::Le, rat(-1)).unwrap();
        inf.set_lower_bound(0, rat(0)).unwrap();
        assert_eq!(inf.vertex_oracle().unwrap(), LpOutcome::Infeasible);

        let mut unb = LinearProgram::new(1);
        unb.set_objective(rats(&[-1])).unwrap();
        unb.set_lower_bound(0, rat(0)).unwrap();
        assert_eq!(unb.vertex_oracle().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn oracle_guard() {
        let lp = LinearProgram::new(9);
        assert_eq!(
            lp.vertex_oracle(),
            Err(LpError::OracleGuard { num_vars: 9, num_constraints: 0 })
        );
    }

    #[test]
    fn oracle_ties_and_degeneracy_agree_with_simplex_value() {
        // Multiple optima: min x + y on the segment x + y == 1, x, y >= 0.
        let mut lp = LinearProgram::new(2);
        lp.set_objective(rats(&[1, 1])).unwrap();
        lp.push_constraint(rats(&[1, 1]), Relation::Eq, rat(1)).unwrap();
        lp.set_lower_bound(0, rat(0)).unwrap();
        lp.set_lower_bound(1, rat(0)).unwrap();
        let simplex = lp.solve();
        let oracle = lp.vertex_oracle().unwrap();
        assert_eq!(simplex.value(), oracle.value());
    }

    fn intro_instance() -> Instance {
        Instance::new(vec![rat(1), rat(1)], vec![vec![rat(20)], vec![rat(30)]]).unwrap()
    }

    #[test]
    fn payment_lp_intro_balanced_transfer() {
        // Smallest worst charge over balanced vectors: 10 at (10, -10).
        let inst = intro_instance();
        let alloc = Allocation::new(vec![1], 2).unwrap();
        let lp = build_payment_lp(&inst, &alloc, ObjectiveKind::P3max).unwrap();
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(10));
                assert_eq!(&point[..2], &[rat(10), rat(-10)]);
            }
            other => panic!("expected optimum, got {:?}", other),
        }
    }

    #[test]
    fn payment_lp_infeasible_allocation() {
        // Item to the low-value agent: no payments help, the LP agrees with
        // the cycle criterion.
        let inst = intro_instance();
        let alloc = Allocation::new(vec![0], 2).unwrap();
        for objective in [ObjectiveKind::P2, ObjectiveKind::P3max, ObjectiveKind::P5sum] {
            let lp = build_payment_lp(&inst, &alloc, objective).unwrap();
            assert_eq!(lp.solve(), LpOutcome::Infeasible, "{:?}", objective);
            assert_eq!(lp.vertex_oracle().unwrap(), LpOutcome::Infeasible, "{:?}", objective);
        }
    }

    #[test]
    fn payment_lp_no_items_is_zero() {
        let inst = Instance::new(vec![rat(1), rat(2)], vec![vec![], vec![]]).unwrap();
        let alloc = Allocation::new(vec![], 2).unwrap();
        for objective in [
            ObjectiveKind::P1,
            ObjectiveKind::P1w,
            ObjectiveKind::P2,
            ObjectiveKind::P3max,
            ObjectiveKind::P3norm,
            ObjectiveKind::P4,
            ObjectiveKind::P5sum,
            ObjectiveKind::P5max,
        ] {
            let lp = build_payment_lp(&inst, &alloc, objective).unwrap();
            assert_eq!(lp.solve().value(), Some(&rat(0)), "{:?}", objective);
        }
    }

    #[test]
    fn payment_lp_solutions_are_wef_and_classified() {
        // The first n coordinates of any optimum form a WEF payment vector
        // of the objective's class.
        let inst = Instance::new(
            vec![rat(1), rat(2), rat(1)],
            vec![
                vec![rat(9), rat(0), rat(7)],
                vec![rat(5), rat(8), rat(2)],
                vec![rat(0), rat(4), rat(6)],
            ],
        )
        .unwrap();
        let alloc = Allocation::new(vec![0, 1, 2], 3).unwrap();
        let n = inst.num_agents();
        for (objective, must_be_subsidy, must_be_balanced) in [
            (ObjectiveKind::P1, true, false),
            (ObjectiveKind::P1w, true, false),
            (ObjectiveKind::P2, true, false),
            (ObjectiveKind::P3max, false, true),
            (ObjectiveKind::P3norm, false, true),
            (ObjectiveKind::P4, false, true),
            (ObjectiveKind::P5sum, false, true),
            (ObjectiveKind::P5max, false, true),
        ] {
            let lp = build_payment_lp(&inst, &alloc, objective).unwrap();
            let outcome = lp.solve();
            let point = outcome.point().unwrap_or_else(|| panic!("{:?} not optimal", objective));
            let p = PaymentVector::new(point[..n].to_vec());
            assert!(check_wef(&inst, &alloc, &p).unwrap().is_wef(), "{:?}", objective);
            if must_be_subsidy {
                assert!(p.is_subsidy(), "{:?}", objective);
            }
            if must_be_balanced {
                assert!(p.is_balanced(), "{:?}", objective);
            }
        }
    }

    #[test]
    fn payment_lp_matches_oracle_on_small_objectives() {
        let inst = intro_instance();
        let alloc = Allocation::new(vec![1], 2).unwrap();
        for objective in [
            ObjectiveKind::P1,
            ObjectiveKind::P1w,
            ObjectiveKind::P2,
            ObjectiveKind::P3max,
            ObjectiveKind::P3norm,
            ObjectiveKind::P4,
            ObjectiveKind::P5sum,
            ObjectiveKind::P5max,
        ] {
            let lp = build_payment_lp(&inst, &alloc, objective).unwrap();
            let simplex = lp.solve();
            let oracle = lp.vertex_oracle().unwrap();
            assert_eq!(simplex.value(), oracle.value(), "{:?}", objective);
        }
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        /// Random tiny LPs: 1-3 variables, 0-4 rows, mixed bounds. The
        /// oracle's no-line assumption is kept by bounding every variable.
        fn arb_lp() -> impl Strategy<Value = LinearProgram> {
            (1usize..=3, 0usize..=4).prop_flat_map(|(nv, nc)| {
                (
                    proptest::collection::vec(-4i64..=4, nv),
                    proptest::collection::vec(
                        (proptest::collection::vec(-3i64..=3, nv), proptest::bool::ANY, -6i64..=6),
                        nc,
                    ),
                    proptest::collection::vec(-3i64..=0, nv),
                )
                    .prop_map(move |(obj, rows, bounds)| {
                        let mut lp = LinearProgram::new(nv);
                        lp.set_objective(obj.into_iter().map(rat).collect()).unwrap();
                        for (coeffs, eq, rhs) in rows {
                            let relation = if eq { Relation::Eq } else { Relation::Le };
                            lp.push_constraint(
                                coeffs.into_iter().map(rat).collect(),
                                relation,
                                rat(rhs),
                            )
                            .unwrap();
                        }
                        for (v, b) in bounds.into_iter().enumerate() {
                            lp.set_lower_bound(v, rat(b)).unwrap();
                        }
                        lp
                    })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            // The simplex and the brute-force oracle agree on status and
            // optimal value for arbitrary tiny programs.
            #[test]
            fn simplex_agrees_with_oracle(lp in arb_lp()) {
                let simplex = lp.solve();
                let oracle = lp.vertex_oracle().unwrap();
                match (&simplex, &oracle) {
                    (LpOutcome::Optimal { value: a, point }, LpOutcome::Optimal { value: b, .. }) => {
                        prop_assert_eq!(a, b);
                        // The simplex point must actually attain the value
                        // and satisfy all constraints.
                        for c in lp.constraints() {
                            let lhs: Rational =
                                c.coeffs.iter().zip(point).map(|(x, y)| x * y).sum();
                            match c.relation {
                                Relation::Le => prop_assert!(lhs <= c.rhs),
                                Relation::Eq => prop_assert_eq!(lhs, c.rhs.clone()),
                            }
                        }
                        for (v, b) in lp.lower_bounds().iter().enumerate() {
                            if let Some(b) = b {
                                prop_assert!(&point[v] >= b);
                            }
                        }
                    }
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
        }
    }
}
