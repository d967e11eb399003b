//! Double-double (~106-bit) power-series oracle for J_n, Y_n and H_n.
//!
//! Shares no code with the library evaluators. Accurate to far better than
//! 1e-20 relative for `|z| <= 20`, `n <= 30`.
#![allow(dead_code)]

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const EULER: Dd = Dd {
        hi: 0.577_215_664_901_532_9,
        lo: -4.942_915_152_430_645e-18,
    };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mulf(self, f: f64) -> Dd {
        self.mul(Dd::from(f))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mulf(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mulf(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = Dd::from(self.hi.sqrt());
        // one Newton step doubles the precision
        s.add(self.sub(s.mul(s)).div(s.mulf(2.0)))
    }

    pub fn exp(self) -> Dd {
        const HALVINGS: i32 = 10;
        let x = self.mulf(1.0 / f64::from(1 << HALVINGS));
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for k in 1..30 {
            term = term.mul(x).div(Dd::from(k as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..HALVINGS {
            sum = sum.mul(sum);
        }
        sum
    }

    pub fn ln(self) -> Dd {
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            y = y.add(self.mul(y.neg().exp())).sub(Dd::ONE);
        }
        y
    }

    /// `(sin x, cos x)` for moderate `|x|`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        const HALVINGS: i32 = 6;
        let x = self.mulf(1.0 / f64::from(1 << HALVINGS));
        let x2 = x.mul(x);
        let mut s = x;
        let mut c = Dd::ONE;
        let mut ts = x;
        let mut tc = Dd::ONE;
        for k in 1..20 {
            ts = ts.mul(x2).div(Dd::from(-((2 * k) * (2 * k + 1)) as f64));
            tc = tc.mul(x2).div(Dd::from(-((2 * k - 1) * (2 * k)) as f64));
            s = s.add(ts);
            c = c.add(tc);
        }
        for _ in 0..HALVINGS {
            let s2 = s.mul(c).mulf(2.0);
            let c2 = c.mul(c).sub(s.mul(s));
            s = s2;
            c = c2;
        }
        (s, c)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub fn from(z: Complex64) -> Cdd {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }

    pub fn real(x: Dd) -> Cdd {
        Cdd { re: x, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }

    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn scale(self, f: Dd) -> Cdd {
        Cdd {
            re: self.re.mul(f),
            im: self.im.mul(f),
        }
    }

    pub fn div(self, o: Cdd) -> Cdd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(Cdd {
            re: o.re,
            im: o.im.neg(),
        });
        Cdd {
            re: num.re.div(den),
            im: num.im.div(den),
        }
    }

    pub fn times_i(self) -> Cdd {
        Cdd {
            re: self.im.neg(),
            im: self.re,
        }
    }

    pub fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Cdd {
        let m2 = self.re.mul(self.re).add(self.im.mul(self.im));
        let ln_mod = m2.ln().mulf(0.5);
        let modulus = m2.sqrt();
        let theta0 = self.im.hi.atan2(self.re.hi);
        let (s, c) = Dd::from(theta0).sin_cos();
        // sin(theta - theta0) = (im cos - re sin)/|z|
        let delta = self.im.mul(c).sub(self.re.mul(s)).div(modulus);
        Cdd {
            re: ln_mod,
            im: Dd::from(theta0).add(delta),
        }
    }
}

fn factorial(n: usize) -> Dd {
    let mut f = Dd::ONE;
    for j in 2..=n {
        f = f.mulf(j as f64);
    }
    f
}

fn powi(z: Cdd, n: usize) -> Cdd {
    let mut p = Cdd::real(Dd::ONE);
    for _ in 0..n {
        p = p.mul(z);
    }
    p
}

fn digamma_int(m: usize) -> Dd {
    let mut s = Dd::EULER.neg();
    for j in 1..m {
        s = s.add(Dd::ONE.div(Dd::from(j as f64)));
    }
    s
}

fn j_dd(n: usize, z: Cdd) -> Cdd {
    let half = z.scale(Dd::from(0.5));
    let w = half.mul(half);
    let w = Cdd {
        re: w.re.neg(),
        im: w.im.neg(),
    };
    let mut term = Cdd::real(Dd::ONE.div(factorial(n)));
    let mut sum = term;
    let mut biggest = term.norm_hi();
    for k in 1..500 {
        let den = Dd::from((k * (n + k)) as f64);
        term = term.mul(w);
        term = Cdd {
            re: term.re.div(den),
            im: term.im.div(den),
        };
        sum = sum.add(term);
        biggest = biggest.max(term.norm_hi());
        if term.norm_hi() < 1e-36 * biggest && k > 10 {
            break;
        }
    }
    powi(half, n).mul(sum)
}

fn y_dd(n: usize, z: Cdd) -> Cdd {
    let pi = Dd::PI;
    let half = z.scale(Dd::from(0.5));
    let w = half.mul(half);
    // finite part
    let mut finite = Cdd::real(Dd::ZERO);
    if n > 0 {
        let inv_half_n = Cdd::real(Dd::ONE).div(powi(half, n));
        let mut wk = Cdd::real(Dd::ONE);
        for k in 0..n {
            let c = factorial(n - k - 1).div(factorial(k));
            finite = finite.add(wk.scale(c));
            wk = wk.mul(w);
        }
        finite = finite.mul(inv_half_n);
    }
    let log_part = half.ln().mul(j_dd(n, z)).scale(Dd::from(2.0).div(pi));
    let mw = Cdd {
        re: w.re.neg(),
        im: w.im.neg(),
    };
    let mut term = Cdd::real(Dd::ONE.div(factorial(n)));
    let mut sum = term.scale(digamma_int(1).add(digamma_int(n + 1)));
    let mut biggest = sum.norm_hi().max(1e-300);
    for k in 1..500 {
        let den = Dd::from((k * (n + k)) as f64);
        term = term.mul(mw);
        term = Cdd {
            re: term.re.div(den),
            im: term.im.div(den),
        };
        let t = term.scale(digamma_int(k + 1).add(digamma_int(n + k + 1)));
        sum = sum.add(t);
        biggest = biggest.max(t.norm_hi());
        if t.norm_hi() < 1e-36 * biggest && k > 10 {
            break;
        }
    }
    let series = powi(half, n).mul(sum);
    let inv_pi = Dd::ONE.div(pi);
    log_part
        .sub(finite.scale(inv_pi))
        .sub(series.scale(inv_pi))
}

pub fn bessel_j(n: usize, z: Complex64) -> Complex64 {
    j_dd(n, Cdd::from(z)).to_c64()
}

pub fn bessel_y(n: usize, z: Complex64) -> Complex64 {
    y_dd(n, Cdd::from(z)).to_c64()
}

pub fn hankel1(n: usize, z: Complex64) -> Complex64 {
    let zz = Cdd::from(z);
    j_dd(n, zz).add(y_dd(n, zz).times_i()).to_c64()
}

pub fn hankel2(n: usize, z: Complex64) -> Complex64 {
    let zz = Cdd::from(z);
    j_dd(n, zz).sub(y_dd(n, zz).times_i()).to_c64()
}
