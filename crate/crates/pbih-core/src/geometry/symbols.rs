//! Symbolic assembly of every pointwise field of an immersed hypersurface.
//!
//! All quantities are built once as expressions in the chart variables by
//! exact differentiation and composition, then evaluated at sample points
//! with a shared cache. The mean curvature therefore sees second derivatives
//! of the immersion, and its intrinsic Laplacian fourth derivatives — all
//! exact, which is what makes the residual tolerances attainable.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::expr::Expr;

/// Symbolic cofactor-expansion determinant. Charts are low-dimensional, so
/// the factorial term count stays tiny.
pub(crate) fn det_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {
            let mut acc = Expr::zero();
            for col in 0..n {
                let minor: Vec<Vec<Expr>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != col)
                            .map(|c| m[r][c].clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].clone() * det_expr(&minor);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Adjugate-over-determinant symbolic inverse.
fn inverse_exprs(m: &[Vec<Expr>], det: &Expr) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::one() / m[0][0].clone()]];
    }
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Expr>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let cof = det_expr(&minor);
            let signed = if (i + j) % 2 == 0 { cof } else { -cof };
            inv[i][j] = signed / det.clone();
        }
    }
    inv
}

/// Induced-metric machinery: combined metric `e^{2γ} gram`, its determinant,
/// inverse, and the intrinsic gradient/Laplacian builders.
pub(crate) struct MetricSymbols {
    pub chart_vars: Vec<String>,
    pub g: Vec<Vec<Expr>>,
    pub g_inv: Vec<Vec<Expr>>,
    pub sqrt_det: Expr,
}

impl MetricSymbols {
    /// `gram` is the flat Gram matrix of the frame; `gamma_on_m` the
    /// conformal exponent composed onto the chart (zero for flat geometry).
    pub fn new(chart_vars: Vec<String>, gram: Vec<Vec<Expr>>, gamma_on_m: &Expr) -> Self {
        let m = gram.len();
        let det0 = det_expr(&gram);
        let inv0 = inverse_exprs(&gram, &det0);
        let e2 = (Expr::constant(2.0) * gamma_on_m.clone()).exp();
        let em2 = (Expr::constant(-2.0) * gamma_on_m.clone()).exp();
        let g = gram
            .iter()
            .map(|row| row.iter().map(|e| e2.clone() * e.clone()).collect())
            .collect();
        let g_inv = inv0
            .iter()
            .map(|row| row.iter().map(|e| em2.clone() * e.clone()).collect())
            .collect();
        let sqrt_det =
            (Expr::constant(m as f64) * gamma_on_m.clone()).exp() * det0.sqrt();
        Self {
            chart_vars,
            g,
            g_inv,
            sqrt_det,
        }
    }

    /// Chart components of the intrinsic gradient `g^{ij} ∂_j field`.
    pub fn grad(&self, field: &Expr) -> Vec<Expr> {
        let partials: Vec<Expr> = self
            .chart_vars
            .iter()
            .map(|v| field.differentiate(v))
            .collect();
        (0..self.chart_vars.len())
            .map(|i| {
                let mut acc = Expr::zero();
                for (j, p) in partials.iter().enumerate() {
                    acc = acc + self.g_inv[i][j].clone() * p.clone();
                }
                acc
            })
            .collect()
    }

    /// Laplace-Beltrami operator, divergence-of-gradient convention:
    /// `(1/√det g) ∂_i (√det g · g^{ij} ∂_j field)`.
    pub fn lap(&self, field: &Expr) -> Expr {
        let grad = self.grad(field);
        let mut acc = Expr::zero();
        for (i, v) in self.chart_vars.iter().enumerate() {
            let flux = self.sqrt_det.clone() * grad[i].clone();
            acc = acc + flux.differentiate(v);
        }
        acc / self.sqrt_det.clone()
    }
}

/// Every symbolic field of a surface, ready for pointwise evaluation.
pub(crate) struct SurfaceSymbols {
    pub m: usize,
    pub x: Vec<Expr>,
    pub frame: Vec<Vec<Expr>>,
    pub metric: MetricSymbols,
    pub n_euc: Vec<Expr>,
    pub eta: Vec<Expr>,
    pub b: Vec<Vec<Expr>>,
    pub a: Vec<Vec<Expr>>,
    pub f: Expr,
    pub a_norm_sq: Expr,
    pub grad_f: Vec<Expr>,
    pub lap_f: Expr,
    pub ric_eta_eta: Expr,
    pub ricci_eta_tan: Vec<Expr>,
    pub gamma_on_m: Expr,
    pub eta_gamma: Expr,
    pub grad_m_gamma: Vec<Expr>,
    pub lap_m_gamma: Expr,
    pub grad_eta_gamma: Vec<Expr>,
    pub lap_s: Expr,
    pub hess_gamma_eta_eta: Expr,
    pub amb_lap_gamma: Expr,
    pub amb_grad_gamma_sq: Expr,
}

pub(crate) struct SymbolInput<'a> {
    pub chart_vars: &'a [String],
    pub components: &'a [Expr],
    pub amb_coords: &'a [String],
    /// Conformal exponent of the metric the geometry is computed in
    /// (zero expression for flat geometry).
    pub metric_gamma: &'a Expr,
    /// Conformal exponent whose composites (η(γ), Hess_γ(η,η), …) are
    /// populated. Equal to `metric_gamma` when the geometry itself lives in
    /// the conformal metric; an independent γ for base geometry.
    pub field_gamma: &'a Expr,
    /// Ambient Ricci tensor expressions of the metric geometry, if curved.
    pub ricci: Option<&'a [Vec<Expr>]>,
}

impl SurfaceSymbols {
    pub fn build(input: SymbolInput<'_>) -> SurfaceSymbols {
        let m = input.chart_vars.len();
        let n = m + 1;
        let vars = input.chart_vars;

        let x: Vec<Expr> = input.components.to_vec();
        let frame: Vec<Vec<Expr>> = (0..m)
            .map(|i| x.iter().map(|c| c.differentiate(&vars[i])).collect())
            .collect();
        let mut second = vec![vec![Vec::new(); m]; m];
        for i in 0..m {
            for j in 0..m {
                second[i][j] = if j >= i {
                    frame[i].iter().map(|e| e.differentiate(&vars[j])).collect()
                } else {
                    second[j][i].clone()
                };
            }
        }

        // One substitution context so composed subterms stay shared.
        let mut compose_map = BTreeMap::new();
        for (name, comp) in input.amb_coords.iter().zip(&x) {
            compose_map.insert(name.clone(), comp.clone());
        }
        let mut sub = crate::expr::Substitution::new(compose_map);

        let mut gram = vec![vec![Expr::zero(); m]; m];
        for i in 0..m {
            for j in i..m {
                let mut acc = Expr::zero();
                for a in 0..n {
                    acc = acc + frame[i][a].clone() * frame[j][a].clone();
                }
                gram[i][j] = acc.clone();
                gram[j][i] = acc;
            }
        }

        let metric_gamma_on_m = sub.apply(input.metric_gamma);
        let metric = MetricSymbols::new(vars.to_vec(), gram.clone(), &metric_gamma_on_m);

        // Euclidean-unit normal from the generalized cross product of the
        // frame; the sign is fixed per point by the orientation rule later.
        let cross: Vec<Expr> = (0..n)
            .map(|a| {
                let minor: Vec<Vec<Expr>> = (0..m)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != a)
                            .map(|c| frame[i][c].clone())
                            .collect()
                    })
                    .collect();
                let d = det_expr(&minor);
                if a % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect();
        let mut cross_sq = Expr::zero();
        for c in &cross {
            cross_sq = cross_sq + c.clone() * c.clone();
        }
        let cross_norm = cross_sq.sqrt();
        let n_euc: Vec<Expr> = cross.iter().map(|c| c.clone() / cross_norm.clone()).collect();

        let e_minus_g = (-metric_gamma_on_m.clone()).exp();
        let eta: Vec<Expr> = n_euc.iter().map(|c| e_minus_g.clone() * c.clone()).collect();

        // Second fundamental form in the metric geometry:
        // B_ij = e^{γ} ⟨ ∂_ij X + Γ̃(X_i, X_j), n ⟩ with the conformal
        // Christoffel correction Γ̃(U,V) = U(γ)V + V(γ)U − ⟨U,V⟩ ∇γ.
        let dgamma_chart: Vec<Expr> = vars
            .iter()
            .map(|v| metric_gamma_on_m.differentiate(v))
            .collect();
        let amb_grad_metric_gamma: Vec<Expr> = input
            .amb_coords
            .iter()
            .map(|c| input.metric_gamma.differentiate(c))
            .collect();
        let amb_grad_metric_gamma_on_m: Vec<Expr> = amb_grad_metric_gamma
            .iter()
            .map(|e| sub.apply(e))
            .collect();
        let e_plus_g = metric_gamma_on_m.clone().exp();
        let mut b = vec![vec![Expr::zero(); m]; m];
        for i in 0..m {
            for j in i..m {
                let mut acc = Expr::zero();
                for a in 0..n {
                    let mut sec = second[i][j][a].clone();
                    sec = sec + dgamma_chart[i].clone() * frame[j][a].clone();
                    sec = sec + dgamma_chart[j].clone() * frame[i][a].clone();
                    sec = sec - gram[i][j].clone() * amb_grad_metric_gamma_on_m[a].clone();
                    acc = acc + sec * n_euc[a].clone();
                }
                let entry = e_plus_g.clone() * acc;
                b[i][j] = entry.clone();
                b[j][i] = entry;
            }
        }

        // Shape operator A^i_j = g^{ik} B_kj, mean curvature, |A|².
        let mut a_op = vec![vec![Expr::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = Expr::zero();
                for k in 0..m {
                    acc = acc + metric.g_inv[i][k].clone() * b[k][j].clone();
                }
                a_op[i][j] = acc;
            }
        }
        let mut trace_a = Expr::zero();
        for i in 0..m {
            trace_a = trace_a + a_op[i][i].clone();
        }
        let f = Expr::constant(1.0 / m as f64) * trace_a;
        let mut a_norm_sq = Expr::zero();
        for i in 0..m {
            for j in 0..m {
                a_norm_sq = a_norm_sq + a_op[i][j].clone() * a_op[j][i].clone();
            }
        }

        let grad_f = metric.grad(&f);
        let lap_f = metric.lap(&f);

        // Ambient Ricci contractions, composed onto the chart. The conformal
        // factors from raising with the ambient metric and pairing with the
        // frame cancel, leaving g̃⁻¹ · (R_ac η^c X_j^a).
        let (ric_eta_eta, ricci_eta_tan) = match input.ricci {
            None => (Expr::zero(), vec![Expr::zero(); m]),
            Some(ricci) => {
                let ricci_on_m: Vec<Vec<Expr>> = ricci
                    .iter()
                    .map(|row| row.iter().map(|e| sub.apply(e)).collect())
                    .collect();
                let mut ree = Expr::zero();
                for a in 0..n {
                    for c in 0..n {
                        ree = ree + ricci_on_m[a][c].clone() * eta[a].clone() * eta[c].clone();
                    }
                }
                let reta: Vec<Expr> = (0..n)
                    .map(|a| {
                        let mut acc = Expr::zero();
                        for c in 0..n {
                            acc = acc + ricci_on_m[a][c].clone() * eta[c].clone();
                        }
                        acc
                    })
                    .collect();
                let tan: Vec<Expr> = (0..m)
                    .map(|i| {
                        let mut acc = Expr::zero();
                        for j in 0..m {
                            let mut pair = Expr::zero();
                            for a in 0..n {
                                pair = pair + reta[a].clone() * frame[j][a].clone();
                            }
                            acc = acc + metric.g_inv[i][j].clone() * pair;
                        }
                        acc
                    })
                    .collect();
                (ree, tan)
            }
        };

        // Composites of the field conformal exponent.
        let gamma_on_m = sub.apply(input.field_gamma);
        let amb_grad_field: Vec<Expr> = input
            .amb_coords
            .iter()
            .map(|c| input.field_gamma.differentiate(c))
            .collect();
        let amb_grad_field_on_m: Vec<Expr> =
            amb_grad_field.iter().map(|e| sub.apply(e)).collect();
        let amb_hess_field: Vec<Vec<Expr>> = amb_grad_field
            .iter()
            .map(|gi| {
                input
                    .amb_coords
                    .iter()
                    .map(|c| gi.differentiate(c))
                    .collect()
            })
            .collect();

        let mut eta_gamma = Expr::zero();
        for a in 0..n {
            eta_gamma = eta_gamma + amb_grad_field_on_m[a].clone() * eta[a].clone();
        }
        let s_field = eta_gamma.clone() * (-gamma_on_m.clone()).exp();

        let grad_m_gamma = metric.grad(&gamma_on_m);
        let lap_m_gamma = metric.lap(&gamma_on_m);
        let grad_eta_gamma = metric.grad(&eta_gamma);
        let lap_s = metric.lap(&s_field);

        let mut hess_ee = Expr::zero();
        let mut amb_lap = Expr::zero();
        for a in 0..n {
            for c in 0..n {
                let h = sub.apply(&amb_hess_field[a][c]);
                if a == c {
                    amb_lap = amb_lap + h.clone();
                }
                hess_ee = hess_ee + h * eta[a].clone() * eta[c].clone();
            }
        }
        let mut amb_grad_sq = Expr::zero();
        for a in 0..n {
            amb_grad_sq =
                amb_grad_sq + amb_grad_field_on_m[a].clone() * amb_grad_field_on_m[a].clone();
        }

        SurfaceSymbols {
            m,
            x,
            frame,
            metric,
            n_euc,
            eta,
            b,
            a: a_op,
            f,
            a_norm_sq,
            grad_f,
            lap_f,
            ric_eta_eta,
            ricci_eta_tan,
            gamma_on_m,
            eta_gamma,
            grad_m_gamma,
            lap_m_gamma,
            grad_eta_gamma,
            lap_s,
            hess_gamma_eta_eta: hess_ee,
            amb_lap_gamma: amb_lap,
            amb_grad_gamma_sq: amb_grad_sq,
        }
    }
}
