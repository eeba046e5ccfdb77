//! Quadrature: Gauss-Legendre rules and a vector-valued adaptive
//! Gauss-Kronrod (7/15) integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * std::f64::consts::PI).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Composite rule with `panels` equal panels.
    pub fn composite(&self, mut f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| self.integrate(&mut f, a + k as f64 * h, a + (k + 1) as f64 * h))
            .sum()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Kronrod-15 panel: value and componentwise `|K15 - G7|`.
fn gk15<const K: usize>(
    f: &mut impl FnMut(f64) -> [f64; K],
    a: f64,
    b: f64,
) -> ([f64; K], [f64; K]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kr = [0.0; K];
    let mut ga = [0.0; K];
    let fc = f(c);
    for k in 0..K {
        kr[k] = WGK[7] * fc[k];
        ga[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let d = h * XGK[j];
        let f1 = f(c - d);
        let f2 = f(c + d);
        for k in 0..K {
            let s = f1[k] + f2[k];
            kr[k] += WGK[j] * s;
            if j % 2 == 1 {
                ga[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = [0.0; K];
    for k in 0..K {
        kr[k] *= h;
        ga[k] *= h;
        err[k] = (kr[k] - ga[k]).abs();
    }
    (kr, err)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub intervals: usize,
    pub converged: bool,
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: [f64; K],
    key: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Adaptive Gauss-Kronrod integration of a vector-valued integrand over the
/// consecutive intervals defined by `points` (sorted, at least two).
///
/// `tolerance` maps the current estimate to per-component absolute error
/// targets; bisection continues on the panel with the largest normalised
/// error until every component meets its target or `max_intervals` is hit.
pub fn adaptive<const K: usize>(
    mut f: impl FnMut(f64) -> [f64; K],
    points: &[f64],
    tolerance: impl Fn(&[f64; K]) -> [f64; K],
    max_intervals: usize,
) -> Estimate<K> {
    assert!(points.len() >= 2);
    let mut panels: Vec<Panel<K>> = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            panels.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
                key: 0.0,
            });
        }
    }
    let totals = |ps: &[Panel<K>]| {
        let mut v = [0.0; K];
        let mut e = [0.0; K];
        for p in ps {
            for k in 0..K {
                v[k] += p.value[k];
                e[k] += p.error[k];
            }
        }
        (v, e)
    };
    let (mut value, mut error) = totals(&panels);
    let mut tol = tolerance(&value);
    let normalised = |e: &[f64; K], tol: &[f64; K]| {
        (0..K)
            .map(|k| {
                if tol[k] > 0.0 {
                    e[k] / tol[k]
                } else if e[k] > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    };
    for p in panels.iter_mut() {
        p.key = normalised(&p.error, &tol);
    }
    let mut heap: BinaryHeap<Panel<K>> = panels.into_iter().collect();
    let mut count = heap.len();
    loop {
        if normalised(&error, &tol) <= 1.0 {
            return Estimate {
                value,
                error,
                intervals: count,
                converged: true,
            };
        }
        if count >= max_intervals {
            return Estimate {
                value,
                error,
                intervals: count,
                converged: false,
            };
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // interval exhausted at floating point resolution
            heap.push(Panel { key: 0.0, ..worst });
            return Estimate {
                value,
                error,
                intervals: count,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        for k in 0..K {
            value[k] += v1[k] + v2[k] - worst.value[k];
            error[k] += e1[k] + e2[k] - worst.error[k];
        }
        tol = tolerance(&value);
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
            key: normalised(&e1, &tol),
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
            key: normalised(&e2, &tol),
        });
        count += 1;
        if count.is_multiple_of(64) {
            // resynchronise the running sums to avoid drift
            let all: Vec<Panel<K>> = heap.drain().collect();
            let (v, e) = totals(&all);
            value = v;
            error = e;
            tol = tolerance(&value);
            heap = all
                .into_iter()
                .map(|p| Panel {
                    key: normalised(&p.error, &tol),
                    ..p
                })
                .collect();
        }
    }
    Estimate {
        value,
        error,
        intervals: count,
        converged: false,
    }
}

/// Scalar convenience wrapper with relative and absolute tolerances.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64, abs: f64) -> Estimate<1> {
    adaptive(|x| [f(x)], &[a, b], |v| [abs.max(rel * v[0].abs())], 4000)
}

/// Cumulative trapezoid integral; returns the integral from `xs[0]` at every
/// node.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        out.push(acc);
    }
    out
}
