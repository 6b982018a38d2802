//! Wigner 3j and 6j symbols by the Racah sum formulas.
//!
//! Angular momenta are passed doubled (`2j`, `2m`) so half-integer values stay
//! exact integers. Factorials are tabulated in `f64`, which is exact up to 22!
//! and accurate to a few ulps beyond; the arguments met here stay below 30.

use std::sync::OnceLock;

const MAX_FACTORIAL: usize = 100;

fn factorial(n: i32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_FACTORIAL + 1);
        t.push(1.0);
        for k in 1..=MAX_FACTORIAL {
            t.push(t[k - 1] * k as f64);
        }
        t
    });
    debug_assert!(n >= 0 && (n as usize) <= MAX_FACTORIAL);
    table[n as usize]
}

fn is_even(n: i32) -> bool {
    n % 2 == 0
}

/// Triangle condition on doubled momenta, including integer perimeter.
fn triangle(ta: i32, tb: i32, tc: i32) -> bool {
    ta >= 0 && tb >= 0 && tc >= 0 && tc <= ta + tb && tc >= (ta - tb).abs() && is_even(ta + tb + tc)
}

/// Δ(a b c) = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!
fn delta(ta: i32, tb: i32, tc: i32) -> f64 {
    factorial((ta + tb - tc) / 2) * factorial((ta - tb + tc) / 2) * factorial((-ta + tb + tc) / 2)
        / factorial((ta + tb + tc) / 2 + 1)
}

fn sign(n: i32) -> f64 {
    if is_even(n) {
        1.0
    } else {
        -1.0
    }
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) with doubled arguments.
pub fn three_j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if !is_even(tj1 + tm1) || !is_even(tj2 + tm2) || !is_even(tj3 + tm3) {
        return 0.0;
    }

    let pre = sign((tj1 - tj2 - tm3) / 2)
        * (delta(tj1, tj2, tj3)
            * factorial((tj1 + tm1) / 2)
            * factorial((tj1 - tm1) / 2)
            * factorial((tj2 + tm2) / 2)
            * factorial((tj2 - tm2) / 2)
            * factorial((tj3 + tm3) / 2)
            * factorial((tj3 - tm3) / 2))
        .sqrt();

    // Summation limits keep every factorial argument nonnegative.
    let a1 = (tj3 - tj2 + tm1) / 2;
    let a2 = (tj3 - tj1 - tm2) / 2;
    let b1 = (tj1 + tj2 - tj3) / 2;
    let b2 = (tj1 - tm1) / 2;
    let b3 = (tj2 + tm2) / 2;
    let k_min = 0.max(-a1).max(-a2);
    let k_max = b1.min(b2).min(b3);

    let sum: f64 = (k_min..=k_max)
        .map(|k| {
            sign(k)
                / (factorial(k)
                    * factorial(a1 + k)
                    * factorial(a2 + k)
                    * factorial(b1 - k)
                    * factorial(b2 - k)
                    * factorial(b3 - k))
        })
        .sum();
    pre * sum
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} with doubled arguments.
pub fn six_j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    let triads = [
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    ];
    if triads.iter().any(|&(a, b, c)| !triangle(a, b, c)) {
        return 0.0;
    }
    let pre: f64 = triads
        .iter()
        .map(|&(a, b, c)| delta(a, b, c).sqrt())
        .product();

    let s: Vec<i32> = triads.iter().map(|&(a, b, c)| (a + b + c) / 2).collect();
    let p = [
        (tj1 + tj2 + tj4 + tj5) / 2,
        (tj2 + tj3 + tj5 + tj6) / 2,
        (tj3 + tj1 + tj6 + tj4) / 2,
    ];
    let t_min = *s.iter().max().unwrap();
    let t_max = *p.iter().min().unwrap();

    let sum: f64 = (t_min..=t_max)
        .map(|t| {
            let den: f64 = s.iter().map(|&si| factorial(t - si)).product::<f64>()
                * p.iter().map(|&pi| factorial(pi - t)).product::<f64>();
            sign(t) * factorial(t + 1) / den
        })
        .sum();
    pre * sum
}
