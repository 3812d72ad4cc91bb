//! Real polynomials in one variable, stored lowest degree first.

/// Coefficients below this fraction of the largest one are treated as zero
/// when trimming the leading end.
const TRIM_REL: f64 = 1e-13;

pub type Poly = Vec<f64>;

pub fn add(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (o, x) in out.iter_mut().zip(a) {
        *o += x;
    }
    for (o, x) in out.iter_mut().zip(b) {
        *o += x;
    }
    out
}

pub fn scale(a: &[f64], c: f64) -> Poly {
    a.iter().map(|x| x * c).collect()
}

pub fn mul(a: &[f64], b: &[f64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn eval(a: &[f64], t: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

pub fn derivative(a: &[f64]) -> Poly {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Drops negligible leading coefficients.
pub fn trim(a: &[f64]) -> Poly {
    let big = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut out = a.to_vec();
    while let Some(&last) = out.last() {
        if last.abs() <= TRIM_REL * big || last == 0.0 {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Determinant of a square matrix of polynomials, by cofactor expansion
/// along the first row. Intended for small sizes.
pub fn det(matrix: &[Vec<Poly>]) -> Poly {
    let n = matrix.len();
    match n {
        0 => vec![1.0],
        1 => matrix[0][0].clone(),
        2 => add(
            &mul(&matrix[0][0], &matrix[1][1]),
            &scale(&mul(&matrix[0][1], &matrix[1][0]), -1.0),
        ),
        _ => {
            let mut acc: Poly = Vec::new();
            for col in 0..n {
                if matrix[0][col].iter().all(|&c| c == 0.0) {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = matrix[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = mul(&matrix[0][col], &det(&minor));
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                acc = add(&acc, &scale(&term, sign));
            }
            acc
        }
    }
}

/// Real roots and critical points of `a`, sorted. Roots are isolated
/// between consecutive critical points (where the polynomial is monotone)
/// and refined by bisection.
pub fn real_roots(a: &[f64]) -> Vec<f64> {
    let a = trim(a);
    match a.len() {
        0 | 1 => Vec::new(),
        2 => vec![-a[0] / a[1]],
        _ => {
            let lead = *a.last().expect("nonempty");
            let bound = 1.0
                + a[..a.len() - 1]
                    .iter()
                    .fold(0.0f64, |m, c| m.max((c / lead).abs()));
            let mut crit: Vec<f64> = real_roots(&derivative(&a))
                .into_iter()
                .filter(|x| x.abs() < bound)
                .collect();
            crit.sort_by(f64::total_cmp);
            let mut knots = vec![-bound];
            knots.extend(crit.iter().copied());
            knots.push(bound);
            let mut roots = Vec::new();
            for w in knots.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let (flo, fhi) = (eval(&a, lo), eval(&a, hi));
                if flo == 0.0 {
                    roots.push(lo);
                } else if flo.signum() != fhi.signum() && fhi != 0.0 {
                    roots.push(bisect(&a, lo, hi, flo));
                }
            }
            if eval(&a, bound) == 0.0 {
                roots.push(bound);
            }
            roots.extend(crit);
            roots.sort_by(f64::total_cmp);
            roots.dedup();
            roots
        }
    }
}

fn bisect(a: &[f64], mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(a, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
