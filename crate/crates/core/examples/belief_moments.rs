//! Closed-form moments and modes of the truncated-Gaussian belief distribution.

use sectorlearn::belief::rule_of_thumb_probability;
use sectorlearn::moments::{pd_moments, pi_moments, truncated_report};
use sectorlearn::SectorParams;

fn main() -> sectorlearn::Result<()> {
    let p = SectorParams::new(0.4, 0.0, 0.5, 0.1, 0.1);
    let history = [0.2, 0.4, 0.3, 0.5];
    let r = pd_moments(&history, &p);
    println!("pd: E = {:.6}  Var = {:.6}  mode = {:.6}  (v = {:.6}, phi = {:.6})", r.expectation, r.variance, r.mode, r.vbar, r.phibar);
    let r = pi_moments(0.3, 0.5, &p);
    println!("pi: E = {:.6}  Var = {:.6}  mode = {:.6}", r.expectation, r.variance, r.mode);
    for v in [-0.2, 0.0, 0.1, 0.5] {
        let r = truncated_report(v, 0.3);
        println!("(v={v:+.1}, phi=0.3)^+: E = {:.6}  mode = {:.6}", r.expectation, r.mode);
    }
    println!("P(zeta <= 0.05) = {:.6}", rule_of_thumb_probability(&p, &history, 0.05)?);
    Ok(())
}
