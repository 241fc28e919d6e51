use super::potential::JetValue;
use super::{Cap, JetError, Potential, ScalarSeries};
use crate::arith::{gauss, gauss_int, rat, ratio, Coeff, GaussRat};

/// Type of a covariant tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Hol,
    Anti,
}

/// Covariant tensor with series-valued components, stored row-major.
#[derive(Clone, Debug)]
pub struct ComponentTensor<C> {
    n: usize,
    slots: Vec<Slot>,
    comps: Vec<ScalarSeries<C>>,
}

fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

fn unflatten(n: usize, rank: usize, mut k: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for s in (0..rank).rev() {
        idx[s] = k % n;
        k /= n;
    }
    idx
}

impl<C: Coeff> ComponentTensor<C> {
    pub fn from_fn<F: FnMut(&[usize]) -> ScalarSeries<C>>(
        n: usize,
        slots: Vec<Slot>,
        mut f: F,
    ) -> Self {
        let len = n.pow(slots.len() as u32);
        let comps = (0..len).map(|k| f(&unflatten(n, slots.len(), k))).collect();
        ComponentTensor { n, slots, comps }
    }

    pub fn scalar(s: ScalarSeries<C>) -> Self {
        ComponentTensor {
            n: s.n(),
            slots: Vec::new(),
            comps: vec![s],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, idx: &[usize]) -> &ScalarSeries<C> {
        &self.comps[flat_index(self.n, idx)]
    }

    pub fn as_scalar(&self) -> Option<&ScalarSeries<C>> {
        (self.slots.is_empty()).then(|| &self.comps[0])
    }

    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        let mut comps = Vec::with_capacity(self.comps.len() * other.comps.len());
        for a in &self.comps {
            for b in &other.comps {
                comps.push(a.mul(b));
            }
        }
        ComponentTensor {
            n: self.n,
            slots,
            comps,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.slots, other.slots, "slot types must agree");
        ComponentTensor {
            n: self.n,
            slots: self.slots.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale_series(&self, s: &ScalarSeries<C>) -> Self {
        ComponentTensor {
            n: self.n,
            slots: self.slots.clone(),
            comps: self.comps.iter().map(|c| c.mul(s)).collect(),
        }
    }

    pub fn scale(&self, s: &GaussRat) -> Self {
        ComponentTensor {
            n: self.n,
            slots: self.slots.clone(),
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn at_origin(&self) -> Result<Vec<C>, JetError> {
        self.comps.iter().map(|c| c.at_origin()).collect()
    }
}

/// Metric, inverse metric, Christoffel symbols and curvature of
/// `|z|² + H` as truncated series around the origin.
#[derive(Clone, Debug)]
pub struct CurvaturePackage<C> {
    pub n: usize,
    /// `g_{ab̄}`.
    pub metric: ComponentTensor<C>,
    /// `g^{ab̄}`, indexed `[a][b]`.
    pub inverse: Vec<Vec<ScalarSeries<C>>>,
    /// `Γ^k_{ij}`, indexed `[k][i][j]`.
    gamma: Vec<Vec<Vec<ScalarSeries<C>>>>,
    /// `Γ̄^{k̄}_{īj̄}`, indexed `[k][i][j]`.
    gamma_bar: Vec<Vec<Vec<ScalarSeries<C>>>>,
    /// `R_{ab̄cd̄}`.
    pub riemann: ComponentTensor<C>,
    /// `Ric_{ab̄}`.
    pub ricci: ComponentTensor<C>,
    pub scalar: ScalarSeries<C>,
}

fn mat_mul<C: Coeff>(
    a: &[Vec<ScalarSeries<C>>],
    b: &[Vec<ScalarSeries<C>>],
) -> Vec<Vec<ScalarSeries<C>>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = ScalarSeries::exact_zero(a[i][j].n());
                    for k in 0..n {
                        s.add_assign(&a[i][k].mul(&b[k][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Inverse of `I + E` for `E` vanishing at the origin, by the Neumann series.
fn neumann_inverse<C: Coeff>(e: &[Vec<ScalarSeries<C>>]) -> Vec<Vec<ScalarSeries<C>>> {
    let n = e.len();
    let dim = e[0][0].n();
    let minus_e: Vec<Vec<ScalarSeries<C>>> = e
        .iter()
        .map(|r| r.iter().map(|x| x.neg()).collect())
        .collect();
    let mut inv: Vec<Vec<ScalarSeries<C>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        ScalarSeries::constant(dim, C::one())
                    } else {
                        ScalarSeries::exact_zero(dim)
                    }
                })
                .collect()
        })
        .collect();
    for r in 0..n {
        for c in 0..n {
            inv[r][c] = inv[r][c].truncated(e[r][c].order());
        }
    }
    let mut power = minus_e.clone();
    while power.iter().flatten().any(|x| !x.is_zero()) {
        for r in 0..n {
            for c in 0..n {
                inv[r][c].add_assign(&power[r][c]);
            }
        }
        power = mat_mul(&power, &minus_e);
    }
    inv
}

impl<C: Coeff> CurvaturePackage<C> {
    pub fn from_series(h: &ScalarSeries<C>) -> Self {
        let n = h.n();
        let e: Vec<Vec<ScalarSeries<C>>> = (0..n)
            .map(|a| (0..n).map(|b| h.d_hol(a).d_anti(b)).collect())
            .collect();
        let metric = ComponentTensor::from_fn(n, vec![Slot::Hol, Slot::Anti], |i| {
            let mut s = e[i[0]][i[1]].clone();
            if i[0] == i[1] {
                s.add_assign(&ScalarSeries::constant(n, C::one()));
            }
            s
        });
        let ginv = neumann_inverse(&e);
        let inverse: Vec<Vec<ScalarSeries<C>>> = (0..n)
            .map(|a| (0..n).map(|b| ginv[b][a].clone()).collect())
            .collect();
        let dg_hol: Vec<Vec<Vec<ScalarSeries<C>>>> = (0..n)
            .map(|c| {
                (0..n)
                    .map(|a| (0..n).map(|b| e[a][b].d_hol(c)).collect())
                    .collect()
            })
            .collect();
        let dg_anti: Vec<Vec<Vec<ScalarSeries<C>>>> = (0..n)
            .map(|d| {
                (0..n)
                    .map(|a| (0..n).map(|b| e[a][b].d_anti(d)).collect())
                    .collect()
            })
            .collect();
        let sum = |f: &dyn Fn(usize) -> ScalarSeries<C>| {
            let mut s = ScalarSeries::exact_zero(n);
            for l in 0..n {
                s.add_assign(&f(l));
            }
            s
        };
        let gamma = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| sum(&|l| inverse[k][l].mul(&dg_hol[i][j][l])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let gamma_bar = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| sum(&|l| inverse[l][k].mul(&dg_anti[i][l][j])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let riemann =
            ComponentTensor::from_fn(n, vec![Slot::Hol, Slot::Anti, Slot::Hol, Slot::Anti], |i| {
                let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
                let mut s = dg_hol[c][a][b].d_anti(d);
                for ee in 0..n {
                    for f in 0..n {
                        s.add_assign(
                            &inverse[ee][f]
                                .mul(&dg_hol[c][a][f])
                                .mul(&dg_anti[d][ee][b])
                                .neg(),
                        );
                    }
                }
                s
            });
        let mut pkg = CurvaturePackage {
            n,
            metric,
            inverse,
            gamma,
            gamma_bar,
            riemann,
            ricci: ComponentTensor::scalar(ScalarSeries::exact_zero(n)),
            scalar: ScalarSeries::exact_zero(n),
        };
        pkg.ricci = pkg.contract(&pkg.riemann, 2, 3).scale(&gauss_int(-1));
        pkg.scalar = pkg.contract(&pkg.ricci, 0, 1).comps.pop().expect("scalar");
        pkg
    }

    /// `g^{ab̄} T_{..a..b̄..}` over the given hol and anti slots.
    pub fn contract(&self, t: &ComponentTensor<C>, hol: usize, anti: usize) -> ComponentTensor<C> {
        assert_eq!(t.slots[hol], Slot::Hol);
        assert_eq!(t.slots[anti], Slot::Anti);
        let n = self.n;
        let slots: Vec<Slot> = t
            .slots
            .iter()
            .enumerate()
            .filter(|&(s, _)| s != hol && s != anti)
            .map(|(_, &x)| x)
            .collect();
        ComponentTensor::from_fn(n, slots, |out| {
            let mut full = Vec::with_capacity(out.len() + 2);
            let mut it = out.iter();
            for s in 0..t.rank() {
                full.push(if s == hol || s == anti {
                    0
                } else {
                    *it.next().unwrap()
                });
            }
            let mut acc = ScalarSeries::exact_zero(n);
            for a in 0..n {
                for b in 0..n {
                    full[hol] = a;
                    full[anti] = b;
                    let comp = t.get(&full);
                    if comp.is_zero() || self.inverse[a][b].is_zero() {
                        continue;
                    }
                    acc.add_assign(&self.inverse[a][b].mul(comp));
                }
            }
            if acc.order() == i32::MAX {
                acc = acc.truncated(
                    self.inverse[0][0]
                        .order()
                        .min(t.comps.iter().map(|c| c.order()).min().unwrap_or(i32::MAX)),
                );
            }
            acc
        })
    }

    /// Contracts several `(hol, anti)` slot pairs; positions refer to `t`.
    pub fn contract_pairs(
        &self,
        t: &ComponentTensor<C>,
        pairs: &[(usize, usize)],
    ) -> ComponentTensor<C> {
        let mut cur = t.clone();
        let mut alive: Vec<usize> = (0..t.rank()).collect();
        for &(h, a) in pairs {
            let hp = alive
                .iter()
                .position(|&x| x == h)
                .expect("slot already contracted");
            let ap = alive
                .iter()
                .position(|&x| x == a)
                .expect("slot already contracted");
            cur = self.contract(&cur, hp, ap);
            alive.retain(|&x| x != h && x != a);
        }
        cur
    }

    /// Covariant derivative; the new slot is appended last.
    pub fn nabla(&self, t: &ComponentTensor<C>, dir: Slot) -> ComponentTensor<C> {
        let n = self.n;
        let mut slots = t.slots.clone();
        slots.push(dir);
        let rank = t.rank();
        ComponentTensor::from_fn(n, slots, |idx| {
            let k = idx[rank];
            let base = &idx[..rank];
            let mut s = match dir {
                Slot::Hol => t.get(base).d_hol(k),
                Slot::Anti => t.get(base).d_anti(k),
            };
            let mut moved = base.to_vec();
            for slot in 0..rank {
                if t.slots[slot] != dir {
                    continue;
                }
                let i = base[slot];
                for m in 0..n {
                    let g = match dir {
                        Slot::Hol => &self.gamma[m][k][i],
                        Slot::Anti => &self.gamma_bar[m][k][i],
                    };
                    if g.is_zero() {
                        continue;
                    }
                    moved[slot] = m;
                    s.add_assign(&g.mul(t.get(&moved)).neg());
                }
                moved[slot] = i;
            }
            s
        })
    }

    /// `Δ_g f = g^{ab̄} ∂_a ∂̄_b f`.
    pub fn laplacian(&self, f: &ScalarSeries<C>) -> ScalarSeries<C> {
        let mut acc = ScalarSeries::exact_zero(self.n);
        for a in 0..self.n {
            let da = f.d_hol(a);
            for b in 0..self.n {
                acc.add_assign(&self.inverse[a][b].mul(&da.d_anti(b)));
            }
        }
        acc.truncated(f.order() - 2)
    }

    /// `|R|²`.
    pub fn riemann_norm(&self) -> ScalarSeries<C> {
        let rr = self.riemann.tensor_product(&self.riemann);
        self.contract_pairs(&rr, &[(0, 5), (4, 1), (2, 7), (6, 3)])
            .comps
            .pop()
            .expect("scalar")
    }

    /// `|Ric|²`.
    pub fn ricci_norm(&self) -> ScalarSeries<C> {
        let rr = self.ricci.tensor_product(&self.ricci);
        self.contract_pairs(&rr, &[(0, 3), (2, 1)])
            .comps
            .pop()
            .expect("scalar")
    }

    /// `W_{ad̄} = R_{ab̄cd̄} Ric^{cb̄} − 4 S Ric_{ad̄}` with both Ricci indices raised.
    fn w_tensor(&self) -> ComponentTensor<C> {
        let rric = self.riemann.tensor_product(&self.ricci);
        let first = self.contract_pairs(&rric, &[(4, 1), (2, 5)]);
        first.add(&self.ricci.scale_series(&self.scalar).scale(&gauss_int(-4)))
    }

    /// `∇^{ā} ∇^{d̄}`-type double divergence of `W`.
    fn w_double_divergence(&self) -> ScalarSeries<C> {
        let w = self.w_tensor();
        let x = self.contract(&self.nabla(&w, Slot::Hol), 2, 1);
        let y = self.contract(&self.nabla(&x, Slot::Anti), 0, 1);
        y.as_scalar().expect("scalar").clone()
    }

    /// Weight-three divergence term `(Δ_g(|R|² − 4|Ric|² + 8S²) + 2 Y) / 48`.
    pub fn div_q(&self) -> ScalarSeries<C> {
        let inner = self
            .riemann_norm()
            .add(&self.ricci_norm().scale(&gauss_int(-4)))
            .add(&self.scalar.mul(&self.scalar).scale(&gauss_int(8)));
        let total = self
            .laplacian(&inner)
            .add(&self.w_double_divergence().scale(&gauss_int(2)));
        total.scale(&gauss(ratio(1, 48), rat(0)))
    }
}

/// Series for `|z|² + H` and its curvature, `H` known through `order`.
pub fn curvature_package<C: JetValue>(
    pot: &Potential,
    order: u32,
    cap: Cap,
) -> Result<CurvaturePackage<C>, JetError> {
    Ok(CurvaturePackage::from_series(&pot.series::<C>(order, cap)?))
}

/// `Δ_g` applied `k` times and evaluated at the origin.
pub fn laplacian_g<C: Coeff>(
    pkg: &CurvaturePackage<C>,
    f: &ScalarSeries<C>,
    k: usize,
) -> Result<C, JetError> {
    let mut s = f.clone();
    for _ in 0..k {
        s = pkg.laplacian(&s);
    }
    s.at_origin()
}
