//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Random draws come from a ChaCha stream seeded by `OA_REPLICATOR_SEED`
//! (default 2024), so every run with the same seed checks the same cases.

use std::process::{Command, ExitCode};

use num::BigInt;
use oa_replicator::dynamics::state_at;
use oa_replicator::{
    estimate_period, full_replicator_field, integrate, reduced_field, validate_with,
    BestResponseWalk, BimatrixGame, Convention, HamiltonianSystem, Method, MixedProfile,
    OpenAccessParameters, Player, Portrait, PortraitOptions, PureProfile, PublisherStrategy,
    Rational, ReducedConstants, ScientistStrategy, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEFAULT_SEED: u64 = 2024;

/// Outcome of one criterion: every clause with its measured value.
struct Criterion {
    id: u32,
    title: &'static str,
    clauses: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            clauses: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.clauses.push((ok, detail));
    }

    fn passed(&self) -> bool {
        self.clauses.iter().all(|(ok, _)| *ok)
    }

    fn line(&self) -> String {
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|(ok, d)| format!("{}{d}", if *ok { "" } else { "FAILED " }))
            .collect();
        format!(
            "[{}] criterion {} ({}): {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            clauses.join("; ")
        )
    }
}

fn example() -> ReducedConstants {
    ReducedConstants::new(1.0, 2.0, 2.0, 3.0).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn random_constants(rng: &mut ChaCha8Rng) -> ReducedConstants {
    let mut g = || rng.gen_range(0.1..10.0);
    ReducedConstants::new(g(), g(), g(), g()).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> State {
    State::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi)).unwrap()
}

/// A game whose reduced constants under `convention` are `k`, with random
/// base payoffs.
fn game_with_constants(rng: &mut ChaCha8Rng, k: [f64; 4], convention: Convention) -> BimatrixGame {
    let [a, b, c, d] = k;
    let mut g = || rng.gen_range(-10.0..10.0);
    let (a11, a22, b11, b22) = (g(), g(), g(), g());
    let scientist = [[a11, a22 + a], [a11 + b, a22]];
    let publisher = match convention {
        // c = b22 - b12, d = b11 - b21
        Convention::Derived => [[b11, b22 - c], [b11 - d, b22]],
        // c = b22 - b21, d = b11 - b12
        Convention::Paper => [[b11, b11 - d], [b22 - c, b22]],
    };
    BimatrixGame::new(scientist, publisher)
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(1, "equilibrium reproduction");
    let exact = ReducedConstants::new(q(1, 1), q(2, 1), q(2, 1), q(3, 1)).unwrap();
    let (x0, y0) = exact.fixed_point();
    c.check(
        x0 == q(2, 5) && y0 == q(1, 3),
        format!("exact critical point ({x0}, {y0}) == (2/5, 1/3)"),
    );
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let game = game_with_constants(rng, [1.0, 2.0, 2.0, 3.0], Convention::Derived);
        let p = game.mixed_nash().unwrap();
        worst = worst.max((p.x - 0.4).abs()).max((p.y - 1.0 / 3.0).abs());
    }
    c.check(worst <= 1e-12, format!("mixed_nash of 100 reducing games max err {worst:.2e} <= 1e-12"));
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::new(2, "conservation");
    let k = example();
    let s0 = State::new(0.5, 0.5).unwrap();
    let drift = |dt: f64| {
        integrate(&k, s0, 20.0, dt, Method::Rk4)
            .unwrap()
            .max_energy_deviation()
    };
    let coarse = drift(1e-3);
    let fine = drift(5e-4);
    c.check(coarse <= 1e-8, format!("rk4 dt=1e-3 max|H-H0| {coarse:.2e} <= 1e-8"));
    let ratio = coarse / fine;
    c.check(
        (12.0..=20.0).contains(&ratio),
        format!("rk4 halving ratio {ratio:.3} in [12, 20] (drift {coarse:.2e} -> {fine:.2e})"),
    );

    let tr = integrate(&k, s0, 1000.0, 1e-2, Method::LeapfrogLogit).unwrap();
    let h0 = tr.samples[0].energy;
    let n = tr.samples.len() as f64;
    let (mut st, mut se, mut stt, mut ste) = (0.0, 0.0, 0.0, 0.0);
    for s in &tr.samples {
        let e = s.energy - h0;
        st += s.t;
        se += e;
        stt += s.t * s.t;
        ste += s.t * e;
    }
    let slope = (n * ste - st * se) / (n * stt - st * st);
    let window = |lo: f64, hi: f64| {
        tr.samples
            .iter()
            .filter(|s| s.t >= lo && s.t <= hi)
            .map(|s| (s.energy - h0).abs())
            .fold(0.0f64, f64::max)
    };
    let (early, late) = (window(0.0, 100.0), window(900.0, 1000.0));
    c.check(
        late <= 1.05 * early,
        format!("leapfrog dt=1e-2 bounded drift (max dev first 100 {early:.2e}, last 100 {late:.2e})"),
    );
    c.check(
        slope.abs() < 1e-12,
        format!("leapfrog regression slope {:.2e} < 1e-12", slope.abs()),
    );
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::new(3, "periodicity");
    let k = example();
    let s0 = State::new(0.5, 0.5).unwrap();
    let period = estimate_period(&k, s0, 1e-3).unwrap().period;
    let back = state_at(&k, s0, period, 1e-3, Method::LeapfrogLogit).unwrap();
    let dist = back.distance(&s0);
    c.check(
        dist <= 1e-4,
        format!("orbit from (0.5,0.5) returns within {dist:.2e} <= 1e-4 after T = {period:.6}"),
    );

    let near = State::new(0.4 + 1e-4, 1.0 / 3.0).unwrap();
    let small = estimate_period(&k, near, 1e-3).unwrap().period;
    let omega = HamiltonianSystem::new(k).linearized_frequency();
    let linear = std::f64::consts::TAU / omega;
    let rel = (small - linear).abs() / linear;
    c.check(
        (omega - 2.0 / 5f64.sqrt()).abs() < 1e-15,
        format!("omega = {omega:.7} = 2/sqrt(5)"),
    );
    c.check(
        rel <= 1e-3,
        format!("small orbit period {small:.6} vs 2pi/omega {linear:.6}, rel {rel:.2e} <= 1e-3"),
    );
    c
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(4, "structural identity");
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let k = random_constants(rng);
        let s = random_state(rng, 1e-3, 1.0 - 1e-3);
        let xh = HamiltonianSystem::new(k.clone()).vector_field(&s);
        let rf = reduced_field(&k, &s);
        let [a, b, cc, d] = k.as_array();
        let (x, y) = (s.x(), s.y());
        // Relative to the magnitude of the terms that cancel on nullclines.
        let scale = [
            x * (1.0 - x) * (a + (a + b) * y),
            y * (1.0 - y) * (cc + (cc + d) * x),
        ];
        for i in 0..2 {
            worst = worst.max((xh[i] - rf[i]).abs() / scale[i]);
        }
    }
    c.check(worst <= 1e-13, format!("X_H vs reduced field, 1000 draws, max rel {worst:.2e} <= 1e-13"));
    c
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(5, "gradient and Hessian oracles");
    let (mut grad_err, mut fd_hess, mut exact_ok, mut negative) = (0.0f64, 0.0f64, true, true);
    for _ in 0..100 {
        let k = random_constants(rng);
        let sys = HamiltonianSystem::new(k.clone());

        let s = random_state(rng, 0.05, 0.95);
        let h = 1e-6;
        let e = |x: f64, y: f64| sys.energy(&State::new(x, y).unwrap());
        let fd = [
            (e(s.x() + h, s.y()) - e(s.x() - h, s.y())) / (2.0 * h),
            (e(s.x(), s.y() + h) - e(s.x(), s.y() - h)) / (2.0 * h),
        ];
        let g = sys.gradient(&s);
        grad_err = grad_err.max((fd[0] - g[0]).abs()).max((fd[1] - g[1]).abs());

        let hc = sys.hessian_at_critical();
        negative &= hc[0][0] < 0.0 && hc[1][1] < 0.0 && hc[0][1] == 0.0 && hc[1][0] == 0.0;
        let p = sys.critical_point();
        let hg = 1e-5;
        let grad_at = |x: f64, y: f64| sys.gradient(&State::new(x, y).unwrap());
        let hxx = (grad_at(p.x() + hg, p.y())[0] - grad_at(p.x() - hg, p.y())[0]) / (2.0 * hg);
        let hyy = (grad_at(p.x(), p.y() + hg)[1] - grad_at(p.x(), p.y() - hg)[1]) / (2.0 * hg);
        fd_hess = fd_hess
            .max((hxx - hc[0][0]).abs() / hc[0][0].abs())
            .max((hyy - hc[1][1]).abs() / hc[1][1].abs());

        // Exact: -c/x0² - d/(1-x0)² at x0 = c/(c+d) equals -(c+d)³/(cd),
        // with the constants rounded to rationals.
        let [ra, rb, rc, rd] = [0, 1, 2, 3].map(|_| q(rng.gen_range(1..1000), rng.gen_range(1..100)));
        let one = q(1, 1);
        let x0 = rc.clone() / (rc.clone() + rd.clone());
        let y0 = ra.clone() / (ra.clone() + rb.clone());
        let hxx_exact = -rc.clone() / (x0.clone() * x0.clone())
            - rd.clone() / ((one.clone() - x0.clone()) * (one.clone() - x0));
        let hyy_exact = -ra.clone() / (y0.clone() * y0.clone())
            - rb.clone() / ((one.clone() - y0.clone()) * (one - y0));
        let sum_cd = rc.clone() + rd.clone();
        let sum_ab = ra.clone() + rb.clone();
        exact_ok &= hxx_exact == -(sum_cd.clone() * sum_cd.clone() * sum_cd) / (rc * rd)
            && hyy_exact == -(sum_ab.clone() * sum_ab.clone() * sum_ab) / (ra * rb);
    }
    c.check(grad_err <= 1e-6, format!("grad vs central differences h=1e-6 max abs {grad_err:.2e} <= 1e-6"));
    c.check(exact_ok, "Hessian at critical point equals diag(-(c+d)^3/(cd), -(a+b)^3/(ab)) exactly (100 rational draws)".into());
    c.check(fd_hess <= 1e-4, format!("Hessian vs differences of gradient max rel {fd_hess:.2e} <= 1e-4"));
    c.check(negative, "both Hessian entries negative for 100 draws".into());
    c
}

fn random_parameters(rng: &mut ChaCha8Rng) -> OpenAccessParameters {
    loop {
        let reputation: f64 = rng.gen_range(1.0..20.0);
        let reputation_loss = reputation * rng.gen_range(0.05..0.95);
        let impact: f64 = rng.gen_range(1.0..20.0);
        let impact_loss = impact.min(reputation_loss) * rng.gen_range(0.05..0.95);
        let p = OpenAccessParameters::from_array([
            reputation,
            reputation_loss,
            impact,
            impact_loss,
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..20.0),
        ]);
        if validate_with(&p, true).is_ok() {
            return p;
        }
    }
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Criterion {
    use PublisherStrategy as P;
    use ScientistStrategy as S;
    let mut c = Criterion::new(6, "game-layer properties");
    let expected = [
        (PureProfile::new(S::OpenAccess, P::OpenAccess), Player::Scientist),
        (PureProfile::new(S::Conventional, P::OpenAccess), Player::Publisher),
        (PureProfile::new(S::Conventional, P::Closed), Player::Scientist),
        (PureProfile::new(S::OpenAccess, P::Closed), Player::Publisher),
    ];
    let (mut diffs, mut no_pure, mut cycles, mut verified) = (0, 0, 0, 0);
    let (mut det_err, mut corrected_err) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let params = random_parameters(rng);
        let game = oa_replicator::payoff_matrices(&params).unwrap();
        if game.incentive_differences().iter().all(|&v| v > 0.0) {
            diffs += 1;
        }
        if game.pure_equilibria().is_empty() {
            no_pure += 1;
        }
        if let BestResponseWalk::Cycle { steps } = game.best_response_cycle() {
            let matches = steps.len() == 4
                && steps
                    .iter()
                    .zip(&expected)
                    .all(|(s, (from, mover))| s.from == *from && s.mover == *mover && s.gain > 0.0)
                && steps[3].to == expected[0].0;
            if matches {
                cycles += 1;
            }
        }
        let nash: MixedProfile = game.mixed_nash().unwrap();
        if game.verify_equilibrium(&nash, &1e-9) {
            verified += 1;
        }
        let a = &game.scientist;
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let den = a[0][1] - a[1][1] + a[1][0] - a[0][0];
        let payoff = game.scientist_payoff(&nash);
        det_err = det_err.max((payoff - det / den).abs());
        corrected_err = corrected_err.max((payoff + det / den).abs());
    }
    c.check(diffs == 100, format!("{diffs}/100 with all four incentive differences positive"));
    c.check(no_pure == 100, format!("{no_pure}/100 without pure equilibria"));
    c.check(cycles == 100, format!("{cycles}/100 with the (s1,p1)->(s2,p1)->(s2,p2)->(s1,p2) cycle"));
    c.check(verified == 100, format!("{verified}/100 mixed equilibria verified at tol 1e-9"));
    c.check(
        det_err <= 1e-9,
        format!(
            "scientist payoff vs det A/(a12-a22+a21-a11) max err {det_err:.2e} <= 1e-9 \
             (with -det A the max err is {corrected_err:.2e})"
        ),
    );
    c
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Criterion {
    let mut c = Criterion::new(7, "reduction equivalence");
    for convention in [Convention::Derived, Convention::Paper] {
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let k = random_constants(rng);
            let game = game_with_constants(rng, k.as_array(), convention);
            let from_game = ReducedConstants::from_game(&game, convention).unwrap();
            let s = random_state(rng, 1e-3, 1.0 - 1e-3);
            let full = full_replicator_field(&game, [s.x(), 1.0 - s.x()], [s.y(), 1.0 - s.y()], convention);
            let reduced = reduced_field(&from_game, &s);
            worst = worst
                .max((full[0] - reduced[0]).abs())
                .max((full[2] - reduced[1]).abs())
                .max((full[0] + full[1]).abs())
                .max((full[2] + full[3]).abs());
        }
        c.check(worst <= 1e-12, format!("{convention}: 1000 draws max err {worst:.2e} <= 1e-12"));
    }
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::new(8, "portrait golden file");
    let render = || {
        Command::new(env!("CARGO_BIN_EXE_oa-replicator"))
            .args(["portrait", "--set", "a=1", "--set", "b=2", "--set", "c=2", "--set", "d=3"])
            .output()
            .expect("binary runs")
    };
    let (first, second) = (render(), render());
    let sys = HamiltonianSystem::new(example());
    let portrait = Portrait::build(&sys, &PortraitOptions::default()).unwrap();
    c.check(
        first.status.success() && first.stdout == second.stdout && first.stdout == portrait.to_svg(&sys).into_bytes(),
        format!("two CLI runs give identical SVG bytes ({} bytes)", first.stdout.len()),
    );
    let worst = portrait
        .curves
        .iter()
        .map(|curve| curve.max_level_error(&sys))
        .fold(0.0f64, f64::max);
    c.check(
        portrait.curves.len() == 8 && worst <= 1e-10,
        format!("{} curves, max |H - level| {worst:.2e} <= 1e-10", portrait.curves.len()),
    );
    let centre = State::new(0.4, 1.0 / 3.0).unwrap();
    let windings: Vec<i64> = portrait.curves.iter().map(|curve| curve.winding_number(&centre)).collect();
    c.check(
        windings.iter().all(|&w| w == 1),
        format!("winding numbers about (0.4, 1/3): {windings:?}"),
    );
    c
}

fn main() -> ExitCode {
    let seed = std::env::var("OA_REPLICATOR_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("acceptance suite, seed {seed}");
    let results = [
        criterion_1(&mut rng),
        criterion_2(),
        criterion_3(),
        criterion_4(&mut rng),
        criterion_5(&mut rng),
        criterion_6(&mut rng),
        criterion_7(&mut rng),
        criterion_8(),
    ];
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
