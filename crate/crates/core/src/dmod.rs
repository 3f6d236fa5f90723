//! Free differential modules given by a connection matrix.
//!
//! A module of rank `n` over `R` with connection `D` has `δ(e_j) = Σ_i D_ij e_i`, so
//! `δ(v) = v′ + D·v` on coordinate columns. Under this convention the induced
//! derivations are `D⊗I + I⊗D′` on tensor products, `−Dᵀ` on duals and
//! `g ↦ g′ + D_N·g − g·D_M` on `Hom(M, N)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::report::CheckReport;
use crate::ring::{DiffRing, El, RingHom};

#[derive(Clone, Debug)]
pub struct DiffModule {
    ring: DiffRing,
    conn: Mat,
}

impl DiffModule {
    pub fn free(ring: &DiffRing, connection: Mat) -> Result<DiffModule> {
        if !connection.is_square() || connection.rows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "connection must be a non-empty square matrix, got {}x{}",
                connection.rows(),
                connection.cols()
            )));
        }
        Ok(DiffModule { ring: ring.clone(), conn: connection })
    }

    /// Rank `n` with the zero connection.
    pub fn trivial(ring: &DiffRing, n: usize) -> DiffModule {
        DiffModule { ring: ring.clone(), conn: ring.mat_zero(n, n) }
    }

    pub fn ring(&self) -> &DiffRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.conn.rows()
    }

    pub fn connection(&self) -> &Mat {
        &self.conn
    }

    /// `δ(v) = v′ + D·v`.
    pub fn apply_delta(&self, v: &[El]) -> Result<Vec<El>> {
        if v.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!("vector of length {} for rank {}", v.len(), self.rank())));
        }
        let r = &self.ring;
        let dv = r.mat_vec(&self.conn, v)?;
        Ok(v.iter().zip(dv).map(|(x, y)| r.add(&r.d(x), &y)).collect())
    }

    /// Whether `δ(v) = 0`.
    pub fn is_constant(&self, v: &[El]) -> Result<bool> {
        Ok(self.apply_delta(v)?.iter().all(|x| self.ring.is_zero(x)))
    }

    fn same_ring(&self, other: &DiffModule) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    /// `M ⊗ N` on the basis `e_i ⊗ f_j` at index `i·rank(N) + j`.
    pub fn tensor(&self, other: &DiffModule) -> Result<DiffModule> {
        self.same_ring(other)?;
        let r = &self.ring;
        let left = r.kron(&self.conn, &r.mat_identity(other.rank()));
        let right = r.kron(&r.mat_identity(self.rank()), &other.conn);
        DiffModule::free(r, r.mat_add(&left, &right)?)
    }

    /// `M^∨` on the dual basis, connection `−Dᵀ`.
    pub fn dual(&self) -> DiffModule {
        DiffModule { ring: self.ring.clone(), conn: self.ring.mat_neg(&self.conn.transpose()) }
    }

    /// `Hom(M, N)` on matrix units `E_ab` (an `rank(N) × rank(M)` matrix) at index
    /// `a·rank(M) + b`.
    pub fn hom(m: &DiffModule, n: &DiffModule) -> Result<DiffModule> {
        m.same_ring(n)?;
        let (rm, rn) = (m.rank(), n.rank());
        let r = &m.ring;
        let mut conn = r.mat_zero(rm * rn, rm * rn);
        for a in 0..rn {
            for b in 0..rm {
                let col = a * rm + b;
                // δ(E_ab) = D_N·E_ab − E_ab·D_M
                for c in 0..rn {
                    let row = c * rm + b;
                    let v = r.add(conn.get(row, col), n.conn.get(c, a));
                    conn.set(row, col, v);
                }
                for d in 0..rm {
                    let row = a * rm + d;
                    let v = r.sub(conn.get(row, col), m.conn.get(b, d));
                    conn.set(row, col, v);
                }
            }
        }
        DiffModule::free(r, conn)
    }

    /// Derivation of `g ∈ Hom(M, N)` given as a matrix: `g′ + D_N·g − g·D_M`.
    pub fn hom_delta(m: &DiffModule, n: &DiffModule, g: &Mat) -> Result<Mat> {
        m.same_ring(n)?;
        if g.rows() != n.rank() || g.cols() != m.rank() {
            return Err(Error::ShapeMismatch(format!("map must be {}x{}", n.rank(), m.rank())));
        }
        let r = &m.ring;
        let t = r.mat_add(&r.mat_d(g), &r.mat_mul(&n.conn, g)?)?;
        r.mat_sub(&t, &r.mat_mul(g, &m.conn)?)
    }

    /// `M ⊗_R S` along a differential ring map `R → S`.
    pub fn base_change(&self, h: &RingHom) -> Result<DiffModule> {
        if h.src() != &self.ring {
            return Err(Error::RingMismatch);
        }
        DiffModule::free(h.dst(), h.apply_mat(&self.conn))
    }
}

/// An `R`-linear map between modules with its differentiality recorded.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    src: DiffModule,
    dst: DiffModule,
    matrix: Mat,
    differential: bool,
}

impl ModuleMap {
    pub fn new(src: &DiffModule, dst: &DiffModule, matrix: Mat) -> Result<ModuleMap> {
        let defect = DiffModule::hom_delta(src, dst, &matrix)?;
        let differential = src.ring.mat_is_zero(&defect);
        Ok(ModuleMap { src: src.clone(), dst: dst.clone(), matrix, differential })
    }

    pub fn src(&self) -> &DiffModule {
        &self.src
    }

    pub fn dst(&self) -> &DiffModule {
        &self.dst
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn is_differential(&self) -> bool {
        self.differential
    }

    /// `(δf)(p) = δ(f(p)) − f(δp)` as a matrix.
    pub fn defect(&self) -> Mat {
        DiffModule::hom_delta(&self.src, &self.dst, &self.matrix).expect("shapes checked at construction")
    }

    pub fn apply(&self, v: &[El]) -> Result<Vec<El>> {
        self.src.ring.mat_vec(&self.matrix, v)
    }
}

fn unit_vector(r: &DiffRing, n: usize, i: usize) -> Vec<El> {
    (0..n).map(|k| if k == i { r.one() } else { r.zero() }).collect()
}

fn kron_vec(r: &DiffRing, v: &[El], w: &[El]) -> Vec<El> {
    v.iter().flat_map(|a| w.iter().map(move |b| r.mul(a, b))).collect()
}

fn vec_eq(r: &DiffRing, a: &[El], b: &[El]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| r.eq(x, y))
}

fn show(r: &DiffRing, v: &[El]) -> String {
    let parts: Vec<String> = v.iter().map(|x| r.format(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// `δ(f(p)) = (δf)(p) + f(δp)` for `f` in the dual, on basis pairs and the given samples.
pub fn dual_pairing_check(m: &DiffModule, samples: &[(Vec<El>, Vec<El>)]) -> Result<CheckReport> {
    let r = &m.ring;
    let n = m.rank();
    let dual = m.dual();
    let mut pairs: Vec<(Vec<El>, Vec<El>)> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            pairs.push((unit_vector(r, n, j), unit_vector(r, n, k)));
        }
    }
    pairs.extend(samples.iter().cloned());
    let dot = |f: &[El], p: &[El]| r.sum(&f.iter().zip(p).map(|(a, b)| r.mul(a, b)).collect::<Vec<_>>());
    let mut report = CheckReport::new("dual pairing");
    let mut bad = None;
    for (f, p) in &pairs {
        let lhs = r.d(&dot(f, p));
        let rhs = r.add(&dot(&dual.apply_delta(f)?, p), &dot(f, &m.apply_delta(p)?));
        if !r.eq(&lhs, &rhs) {
            bad = Some(format!("f = {}, p = {}", show(r, f), show(r, p)));
            break;
        }
    }
    report.record("δ(f(p)) = (δf)(p) + f(δp)", bad);
    Ok(report)
}

/// `δ(v⊗w) = δv⊗w + v⊗δw` on basis pairs and the given samples.
pub fn tensor_leibniz_check(m: &DiffModule, n: &DiffModule, samples: &[(Vec<El>, Vec<El>)]) -> Result<CheckReport> {
    let t = m.tensor(n)?;
    let r = &m.ring;
    let mut pairs = Vec::new();
    for i in 0..m.rank() {
        for j in 0..n.rank() {
            pairs.push((unit_vector(r, m.rank(), i), unit_vector(r, n.rank(), j)));
        }
    }
    pairs.extend(samples.iter().cloned());
    let mut bad = None;
    for (v, w) in &pairs {
        let lhs = t.apply_delta(&kron_vec(r, v, w))?;
        let a = kron_vec(r, &m.apply_delta(v)?, w);
        let b = kron_vec(r, v, &n.apply_delta(w)?);
        let rhs: Vec<El> = a.iter().zip(&b).map(|(x, y)| r.add(x, y)).collect();
        if !vec_eq(r, &lhs, &rhs) {
            bad = Some(format!("v = {}, w = {}", show(r, v), show(r, w)));
            break;
        }
    }
    let mut report = CheckReport::new("tensor derivation");
    report.record("δ(v⊗w) = δv⊗w + v⊗δw", bad);
    Ok(report)
}

/// Compare the closed-form Hom derivation with transport through `α: N ⊗ M^∨ → Hom(M, N)`,
/// `α(q ⊗ f)(p) = f(p)·q`, on every matrix unit and on the given maps.
pub fn alpha_transport_check(m: &DiffModule, n: &DiffModule, samples: &[Mat]) -> Result<CheckReport> {
    let r = &m.ring;
    let (rm, rn) = (m.rank(), n.rank());
    let source = n.tensor(&m.dual())?;
    let hom = DiffModule::hom(m, n)?;
    let mut maps = Vec::new();
    for a in 0..rn {
        for b in 0..rm {
            maps.push(Mat::from_fn(rn, rm, |i, j| if i == a && j == b { r.one() } else { r.zero() }));
        }
    }
    maps.extend(samples.iter().cloned());
    let mut report = CheckReport::new("Hom derivation");
    let mut bad_alpha = None;
    let mut bad_conn = None;
    for g in &maps {
        // g corresponds to Σ g_cb q_c ⊗ f_b, the coordinate at index c·rm + b
        let coords: Vec<El> = g.entries().to_vec();
        let transported = source.apply_delta(&coords)?;
        let back = Mat::new(rn, rm, transported)?;
        let closed = DiffModule::hom_delta(m, n, g)?;
        if !r.mat_eq(&back, &closed) && bad_alpha.is_none() {
            bad_alpha = Some(format!("g = {:?}", r.mat_format(g)));
        }
        let via_module = Mat::new(rn, rm, hom.apply_delta(&coords)?)?;
        if !r.mat_eq(&via_module, &closed) && bad_conn.is_none() {
            bad_conn = Some(format!("g = {:?}", r.mat_format(g)));
        }
    }
    report.record("α-transport equals g′ + D_N g − g D_M", bad_alpha);
    report.record("Hom connection equals the closed form", bad_conn);
    Ok(report)
}

/// `Hom(P,Q) ⊗ Hom(P′,Q′) → Hom(P⊗P′, Q⊗Q′)`, `f⊗f′ ↦ f(·)⊗f′(·)`, commutes with δ on all
/// pairs of matrix units.
pub fn hom_tensor_iso_check(p: &DiffModule, q: &DiffModule, p2: &DiffModule, q2: &DiffModule) -> Result<CheckReport> {
    for other in [q, p2, q2] {
        p.same_ring(other)?;
    }
    let r = &p.ring;
    let pp = p.tensor(p2)?;
    let qq = q.tensor(q2)?;
    let units = |rows: usize, cols: usize| -> Vec<Mat> {
        let mut out = Vec::new();
        for a in 0..rows {
            for b in 0..cols {
                out.push(Mat::from_fn(rows, cols, |i, j| if i == a && j == b { r.one() } else { r.zero() }));
            }
        }
        out
    };
    let mut bad = None;
    'outer: for f in units(q.rank(), p.rank()) {
        let df = DiffModule::hom_delta(p, q, &f)?;
        for f2 in units(q2.rank(), p2.rank()) {
            let df2 = DiffModule::hom_delta(p2, q2, &f2)?;
            let lhs = DiffModule::hom_delta(&pp, &qq, &r.kron(&f, &f2))?;
            let rhs = r.mat_add(&r.kron(&df, &f2), &r.kron(&f, &df2))?;
            if !r.mat_eq(&lhs, &rhs) {
                bad = Some(format!("f = {:?}, f′ = {:?}", r.mat_format(&f), r.mat_format(&f2)));
                break 'outer;
            }
        }
    }
    let mut report = CheckReport::new("Hom ⊗ Hom → Hom(⊗, ⊗)");
    report.record("φ(δ(f⊗f′)) = δ(φ(f⊗f′))", bad);
    Ok(report)
}

/// Morita pairings for `P` free with `Q = P^∨` and `B = End(P)`:
/// `f_P: P⊗Q → B`, `p⊗q ↦ p·q(−)` and `g_P: Q⊗P → A`, `q⊗p ↦ q(p)`.
pub fn morita_check(p: &DiffModule) -> Result<CheckReport> {
    let r = &p.ring;
    let n = p.rank();
    let q = p.dual();
    let end = DiffModule::hom(p, p)?;
    let delta_b = |g: &Mat| DiffModule::hom_delta(p, p, g);
    let unit = |i: usize, j: usize| r.mat_unit(n, i, j);
    let e = |i: usize| unit_vector(r, n, i);
    let mut report = CheckReport::new("Morita pairings");

    // (δg)(p) := δ(g p) − g(δp), evaluated column by column, against g′ + [D, g]
    let mut bad = None;
    for a in 0..n {
        for b in 0..n {
            let g = unit(a, b);
            let mut cols = Vec::new();
            for k in 0..n {
                let gp = r.mat_vec(&g, &e(k))?;
                let lhs = p.apply_delta(&gp)?;
                let rhs = r.mat_vec(&g, &p.apply_delta(&e(k))?)?;
                cols.push(lhs.iter().zip(&rhs).map(|(x, y)| r.sub(x, y)).collect::<Vec<_>>());
            }
            let defined = Mat::from_columns(&cols)?;
            let closed = r.mat_add(&r.mat_d(&g), &r.commutator(p.connection(), &g)?)?;
            if (!r.mat_eq(&defined, &closed) || !r.mat_eq(&delta_b(&g)?, &closed)) && bad.is_none() {
                bad = Some(format!("E_{}{}", a + 1, b + 1));
            }
        }
    }
    report.record("B-derivation equals ′ + [D, −]", bad);

    // f_P(e_i ⊗ e_j^∨) = E_ij; P⊗Q uses index i·n + j, as does End(P)
    let pq = p.tensor(&q)?;
    let mut bad = None;
    for i in 0..n {
        for j in 0..n {
            let x = kron_vec(r, &e(i), &e(j));
            let lhs = end.apply_delta(&x)?;
            let rhs = pq.apply_delta(&x)?;
            if !vec_eq(r, &lhs, &rhs) && bad.is_none() {
                bad = Some(format!("e_{} ⊗ e_{}^∨", i + 1, j + 1));
            }
        }
    }
    report.record("f_P is differential", bad);
    let f_matrix = r.mat_identity(n * n);
    report.record(
        "f_P is bijective",
        if r.is_invertible(&f_matrix) { None } else { Some("matrix of f_P is singular".into()) },
    );

    // g_P(e_j^∨ ⊗ e_k) = δ_jk, so its row vector in the basis of Q⊗P (index j·n + k) is vec(I)
    let qp = q.tensor(p)?;
    let g_row: Vec<El> = (0..n * n).map(|idx| if idx / n == idx % n { r.one() } else { r.zero() }).collect();
    let apply_g = |v: &[El]| r.sum(&v.iter().zip(&g_row).map(|(a, b)| r.mul(a, b)).collect::<Vec<_>>());
    let mut bad = None;
    for j in 0..n {
        for k in 0..n {
            let x = kron_vec(r, &e(j), &e(k));
            let lhs = r.d(&apply_g(&x));
            let rhs = apply_g(&qp.apply_delta(&x)?);
            if !r.eq(&lhs, &rhs) && bad.is_none() {
                bad = Some(format!("e_{}^∨ ⊗ e_{}", j + 1, k + 1));
            }
        }
    }
    report.record("g_P is differential", bad);
    report.record(
        "g_P is surjective",
        if r.is_one(&apply_g(&kron_vec(r, &e(0), &e(0)))) { None } else { Some("1 not in the image".into()) },
    );

    // δ(q(p)) = (δq)(p) + q(δp) on basis pairs
    let mut bad = None;
    for j in 0..n {
        for k in 0..n {
            let dq = q.apply_delta(&e(j))?;
            let dp = p.apply_delta(&e(k))?;
            let rhs = r.add(&dq[k], &dp[j]);
            if !r.is_zero(&rhs) && bad.is_none() {
                bad = Some(format!("q = e_{}^∨, p = e_{}", j + 1, k + 1));
            }
        }
    }
    report.record("δ(qp) = (δq)p + q(δp)", bad);

    // Leibniz for composition in B
    let mut bad = None;
    'outer: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let (x, y) = (unit(a, b), unit(c, d));
                    let lhs = delta_b(&r.mat_mul(&x, &y)?)?;
                    let rhs = r.mat_add(&r.mat_mul(&delta_b(&x)?, &y)?, &r.mat_mul(&x, &delta_b(&y)?)?)?;
                    if !r.mat_eq(&lhs, &rhs) {
                        bad = Some(format!("E_{}{} · E_{}{}", a + 1, b + 1, c + 1, d + 1));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.record("B-derivation is Leibniz on matrix units", bad);

    // f_P(p⊗q)·p′ = p·g_P(q⊗p′)
    let mut bad = None;
    'assoc: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = r.mat_vec(&unit(i, j), &e(k))?;
                let scalar = if j == k { r.one() } else { r.zero() };
                let rhs: Vec<El> = e(i).iter().map(|x| r.mul(x, &scalar)).collect();
                if !vec_eq(r, &lhs, &rhs) {
                    bad = Some(format!("p = e_{}, q = e_{}^∨, p′ = e_{}", i + 1, j + 1, k + 1));
                    break 'assoc;
                }
            }
        }
    }
    report.record("f_P(p⊗q)·p′ = p·g_P(q⊗p′)", bad);
    Ok(report)
}
