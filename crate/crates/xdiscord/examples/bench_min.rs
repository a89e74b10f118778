use std::time::Instant;
use xdiscord::{minimize_theta, oracle_discord_2d, XState};
fn main() {
    let s = XState::new(0.027180, 0.000224, 0.027327, 0.945269, 0.141651, 0.0).unwrap();
    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..1000 { acc += minimize_theta(&s).discord_exact; }
    println!("minimize_theta: {:.3} ms/call (acc {acc:.3})", t.elapsed().as_secs_f64());
    let r = minimize_theta(&s);
    println!("gap={:.9} theta={:.6} evals={}", r.gap, r.theta_opt, r.evaluations);
    let t = Instant::now();
    let (min2d, arg) = oracle_discord_2d(&s, 2001, 64);
    println!("oracle 2001x64: {:.3} ms  min={:.9} theta={:.6} phi={:.6}", t.elapsed().as_secs_f64()*1e3, min2d, arg.theta, arg.phi);
    println!("exact={:.9} diff={:.2e}", r.discord_exact, (r.discord_exact - min2d).abs());
}
