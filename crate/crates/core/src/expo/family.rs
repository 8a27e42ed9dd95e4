use std::fmt;

use super::ExpoError;
use crate::index::IndexMap;

/// `coef·j_param + konst` over a parameter `j ≥ 0`; `param` is `None` exactly
/// when `coef = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lin {
    pub coef: i128,
    pub param: Option<usize>,
    pub konst: i128,
}

impl Lin {
    pub fn new(coef: i128, param: Option<usize>, konst: i128) -> Self {
        if coef == 0 || param.is_none() {
            return Lin { coef: 0, param: None, konst };
        }
        Lin { coef, param, konst }
    }

    pub fn constant(konst: i128) -> Self {
        Lin { coef: 0, param: None, konst }
    }

    pub fn scaled(&self, k: i128) -> Self {
        Lin::new(self.coef * k, self.param, self.konst * k)
    }

    /// Substitutes `image` for this form's parameter.
    fn compose(&self, image: Lin) -> Self {
        Lin::new(self.coef * image.coef, image.param, self.coef * image.konst + self.konst)
    }

    pub fn eval(&self, params: &[u64]) -> i128 {
        match self.param {
            None => self.konst,
            Some(p) => self.coef * params[p] as i128 + self.konst,
        }
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, x, y) = egcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// A set of affine forms over shared non-negative parameters, refined by
/// imposing linear constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Forms {
    pub forms: Vec<Lin>,
    next_param: usize,
}

impl Forms {
    /// `n_v = j_v + 1` for every variable.
    pub fn identity(vars: usize) -> Self {
        Forms { forms: (0..vars).map(|v| Lin::new(1, Some(v), 1)).collect(), next_param: vars }
    }

    pub fn push(&mut self, f: Lin) -> usize {
        self.forms.push(f);
        self.forms.len() - 1
    }

    pub fn fresh_param(&mut self) -> usize {
        self.next_param += 1;
        self.next_param - 1
    }

    pub fn substitute(&mut self, p: usize, image: Lin) {
        for f in &mut self.forms {
            if f.param == Some(p) {
                *f = f.compose(image);
            }
        }
    }

    fn substitute_pair(&mut self, u: usize, image_u: Lin, v: usize, image_v: Lin) {
        for f in &mut self.forms {
            if f.param == Some(u) {
                *f = f.compose(image_u);
            } else if f.param == Some(v) {
                *f = f.compose(image_v);
            }
        }
    }

    /// Restricts the parameters to those with `p − q = delta`; false if none remain.
    pub fn impose(&mut self, p: Lin, q: Lin, delta: i128) -> bool {
        // a·j_u − c·j_v = rhs
        let (a, c) = (p.coef, q.coef);
        let rhs = delta - p.konst + q.konst;
        let fix = |forms: &mut Self, param: usize, k: i128, rhs: i128| -> bool {
            if rhs % k != 0 || rhs / k < 0 {
                return false;
            }
            forms.substitute(param, Lin::constant(rhs / k));
            true
        };
        match (p.param, q.param) {
            (None, None) => rhs == 0,
            (Some(u), None) => fix(self, u, a, rhs),
            (None, Some(v)) => fix(self, v, -c, rhs),
            (Some(u), Some(v)) if u == v => {
                if a == c {
                    rhs == 0
                } else {
                    fix(self, u, a - c, rhs)
                }
            }
            (Some(u), Some(v)) => {
                let (g, x, y) = egcd(a, c);
                if rhs % g != 0 {
                    return false;
                }
                let (ju, jv) = (x * (rhs / g), -y * (rhs / g));
                let (step_u, step_v) = (c / g, a / g);
                let t = ceil_div(-ju, step_u).max(ceil_div(-jv, step_v));
                let image_u = Lin::new(step_u, Some(u), ju + step_u * t);
                let image_v = Lin::new(step_v, Some(u), jv + step_v * t);
                self.substitute_pair(u, image_u, v, image_v);
                true
            }
        }
    }

    /// Renumbers parameters in order of first use.
    pub fn compact(&mut self) {
        let mut order: Vec<usize> = Vec::new();
        for f in &self.forms {
            if let Some(p) = f.param {
                if !order.contains(&p) {
                    order.push(p);
                }
            }
        }
        for f in &mut self.forms {
            if let Some(p) = f.param {
                f.param = order.iter().position(|&x| x == p);
            }
        }
        self.next_param = order.len();
    }
}

/// Input vocabulary for describing a family by constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarConstraint {
    Free,
    Fixed(u64),
    /// Every `n ≥ 1` with `n ≡ residue (mod modulus)`.
    Progression { residue: u64, modulus: u64 },
}

/// `left_coeff·n_left − right_coeff·n_right = shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub left: usize,
    pub right: usize,
    pub left_coeff: u64,
    pub right_coeff: u64,
    pub shift: i64,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·n{} − {}·n{} = {}", self.left_coeff, self.left, self.right_coeff, self.right, self.shift)
    }
}

/// Solutions `n_v = map_v(k)` for all parameter tuples `k ≥ 1`; variables sharing
/// a parameter are tied together.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolutionFamily {
    pub maps: Vec<IndexMap>,
    pub param_count: usize,
}

impl SolutionFamily {
    /// No constraint on any variable.
    pub fn free(vars: usize) -> Self {
        SolutionFamily { maps: (0..vars).map(IndexMap::identity).collect(), param_count: vars }
    }

    pub(crate) fn from_forms(forms: &[Lin]) -> Self {
        let mut f = Forms { forms: forms.to_vec(), next_param: 0 };
        f.compact();
        let maps = f
            .forms
            .iter()
            .map(|l| match l.param {
                None => IndexMap::Fixed(to_u64(l.konst)),
                Some(p) => IndexMap::affine(p, to_u64(l.coef), to_i64(l.konst - l.coef)),
            })
            .collect();
        SolutionFamily { maps, param_count: f.next_param }
    }

    /// Builds a family from per-variable constraints and ties
    /// `(left, right, a, b)` meaning `a·n_left = b·n_right`.
    pub fn from_constraints(constraints: &[VarConstraint], ties: &[(usize, usize, u64, u64)]) -> Result<Self, ExpoError> {
        let m = constraints.len();
        let mut forms = Forms::identity(m);
        let mut ok = true;
        for (v, c) in constraints.iter().enumerate() {
            ok &= match *c {
                VarConstraint::Free => true,
                VarConstraint::Fixed(n) => forms.impose(forms.forms[v], Lin::constant(n as i128), 0),
                VarConstraint::Progression { residue, modulus } => {
                    if modulus == 0 {
                        false
                    } else {
                        let start = (residue as i128 - 1).rem_euclid(modulus as i128) + 1;
                        let t = forms.fresh_param();
                        forms.impose(forms.forms[v], Lin::new(modulus as i128, Some(t), start), 0)
                    }
                }
            };
        }
        for &(left, right, a, b) in ties {
            if left >= m || right >= m || a == 0 || b == 0 {
                return Err(ExpoError::InconsistentFamily);
            }
            ok &= forms.impose(forms.forms[left].scaled(a as i128), forms.forms[right].scaled(b as i128), 0);
        }
        if !ok {
            return Err(ExpoError::InconsistentFamily);
        }
        Ok(Self::from_forms(&forms.forms))
    }

    pub fn sample(&self, params: &[u64]) -> Vec<u64> {
        self.maps.iter().map(|m| m.apply(params)).collect()
    }

    /// Whether the tuple lies in the family.
    pub fn contains(&self, values: &[u64]) -> bool {
        if values.len() != self.maps.len() {
            return false;
        }
        let mut params: Vec<Option<i64>> = vec![None; self.param_count];
        for (m, &n) in self.maps.iter().zip(values) {
            match *m {
                IndexMap::Fixed(x) => {
                    if x != n {
                        return false;
                    }
                }
                IndexMap::Affine { slot, scale, offset } => {
                    let d = n as i64 - offset;
                    if d % scale as i64 != 0 || d / (scale as i64) < 1 {
                        return false;
                    }
                    let k = d / scale as i64;
                    match params[slot] {
                        Some(prev) if prev != k => return false,
                        _ => params[slot] = Some(k),
                    }
                }
            }
        }
        true
    }

    /// Linear relations between consecutive variables that share a parameter.
    pub fn ties(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        for (left, m) in self.maps.iter().enumerate() {
            let IndexMap::Affine { slot, scale: s1, offset: o1 } = *m else { continue };
            let next = self.maps.iter().enumerate().skip(left + 1).find(|(_, x)| x.slot() == Some(slot));
            if let Some((right, &IndexMap::Affine { scale: s2, offset: o2, .. })) = next {
                let g = num_integer::gcd(s1, s2);
                let (a, b) = (s2 / g, s1 / g);
                out.push(Relation { left, right, left_coeff: a, right_coeff: b, shift: a as i64 * o1 - b as i64 * o2 });
            }
        }
        out
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.maps.iter().enumerate().map(|(v, m)| format!("n{v} = {m}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

fn to_u64(x: i128) -> u64 {
    u64::try_from(x).expect("index value out of range")
}

fn to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("index offset out of range")
}

/// Index substitutions for each family, checked against the variable count.
pub fn families_to_index_sets(families: &[SolutionFamily], vars: usize) -> Result<Vec<(Vec<IndexMap>, usize)>, ExpoError> {
    families
        .iter()
        .map(|f| {
            if f.maps.len() != vars {
                return Err(ExpoError::Dimension(format!("family over {} variables, expected {vars}", f.maps.len())));
            }
            Ok((f.maps.clone(), f.param_count))
        })
        .collect()
}
