//! Maclaurin series for Ai, Bi and their derivatives, summed in double-double.
//!
//! Ai = c1 f - c2 g and Bi = sqrt(3) (c1 f + c2 g), where f and g are the two
//! canonical solutions of y'' = x y. At x = 8 the two products cancel to about
//! one part in 1e14, so the sums and the constants carry ~32 digits.

use twofloat::TwoFloat;

const C1_HI: f64 = 0.355_028_053_887_817_2;
const C1_LO: f64 = 2.052_336_324_362_12e-17;
const C2_HI: f64 = 0.258_819_403_792_806_8;
const C2_LO: f64 = -2.522_243_111_610_832e-17;
const SQRT3: f64 = 1.732_050_807_568_877_2;

const TERM_TOL: f64 = 1e-34;
const MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy)]
pub(crate) struct AiryReal {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

fn dd(hi: f64, lo: f64) -> TwoFloat {
    TwoFloat::new_add(hi, lo)
}

fn converged(term: TwoFloat, scale: f64) -> bool {
    term.hi().abs() <= TERM_TOL * scale
}

pub(crate) fn maclaurin(x: f64) -> AiryReal {
    let x_dd = TwoFloat::from(x);
    let x3 = TwoFloat::new_mul(x, x) * x;

    let mut f = TwoFloat::from(1.0);
    let mut g = x_dd;
    let mut fp = TwoFloat::from(0.0);
    let mut gp = TwoFloat::from(1.0);

    let mut tf = TwoFloat::from(1.0);
    let mut tg = x_dd;
    let mut tfp = TwoFloat::new_mul(x, x) / 2.0;
    let mut tgp = TwoFloat::from(1.0);
    let mut peak = 1.0f64.max(x.abs());

    for k in 1..MAX_TERMS {
        let kf = k as f64;
        tf = tf * x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg = tg * x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        if k > 1 {
            tfp = tfp * x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
        }
        tgp = tgp * x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        peak = peak.max(tf.hi().abs()).max(tg.hi().abs()).max(tfp.hi().abs()).max(tgp.hi().abs());
        if converged(tf, peak) && converged(tg, peak) && converged(tfp, peak) && converged(tgp, peak) {
            break;
        }
    }

    let c1 = dd(C1_HI, C1_LO);
    let c2 = dd(C2_HI, C2_LO);
    let (c1f, c2g, c1fp, c2gp) = (c1 * f, c2 * g, c1 * fp, c2 * gp);
    AiryReal {
        ai: (c1f - c2g).hi(),
        aip: (c1fp - c2gp).hi(),
        bi: SQRT3 * (c1f + c2g).hi(),
        bip: SQRT3 * (c1fp + c2gp).hi(),
    }
}
