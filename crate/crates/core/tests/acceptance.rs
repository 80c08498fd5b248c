//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use xreplay::agents::{DqnAgent, DqnConfig, Encoder, OuNoise};
use xreplay::envs::mountaincar::MountainCar;
use xreplay::envs::pendulum::{pendulum_reward, wrap_angle, Pendulum};
use xreplay::envs::{EnvKind, Environment};
use xreplay::harness::{build_run, format_csv, train, AgentKind, RunConfig, TrainOutcome};
use xreplay::hindsight::{goal_spec_for, relabel_episode, Episode};
use xreplay::nn::{Activation, Mlp, OutputActivation};
use xreplay::prioritized::{PerConfig, SumTree};
use xreplay::replay::{Action, ReplayStack, StrategyFlags, Transition};
use xreplay::rng::seeded;

type Verdict = Result<String, String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

const SEEDS: [u64; 3] = [0, 1, 2];
const EPISODE_LIMIT: usize = 2000;

fn cartpole_run(seed: u64, combined: bool, eval_interval: usize, solve: Option<f64>) -> (TrainOutcome, Duration) {
    let mut cfg = RunConfig::new(EnvKind::CartPole, AgentKind::Dqn).with_flags(StrategyFlags {
        combined,
        ..Default::default()
    });
    cfg.seed = seed;
    cfg.episodes = EPISODE_LIMIT;
    cfg.eval_interval = eval_interval;
    cfg.solve_reward = solve;
    let start = Instant::now();
    let out = train(build_run(cfg).expect("valid config")).expect("training succeeds");
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };

    // Runs shared by the trend and CER-invariant criteria.
    let mut cer_runs = Vec::new();
    suite.check("cartpole CER vs baseline convergence trend", || {
        let mut base = Vec::new();
        let mut cer = Vec::new();
        let cell = |o: &TrainOutcome| o.converged_at.map_or("none".to_string(), |e| e.to_string());
        let mut cells = Vec::new();
        for seed in SEEDS {
            let (b, _) = cartpole_run(seed, false, 10, None);
            let (c, _) = cartpole_run(seed, true, 10, None);
            cells.push(format!("seed {seed}: {}/{}", cell(&b), cell(&c)));
            base.push(b.converged_at.map_or(f64::INFINITY, |e| e as f64));
            cer.push(c.converged_at.map_or(f64::INFINITY, |e| e as f64));
            cer_runs.push(c);
        }
        let (mb, mc) = (median(&mut base), median(&mut cer));
        verdict(
            mc <= 1.25 * mb,
            format!("median episodes baseline {mb}, CER {mc} (bound {}); baseline/CER {}", 1.25 * mb, cells.join(", ")),
        )
    });

    suite.check("cartpole solvable by baseline DQN", || {
        let mut solved = 0;
        let mut cells = Vec::new();
        let mut slowest = Duration::ZERO;
        for seed in SEEDS {
            let (out, took) = cartpole_run(seed, false, 50, Some(195.0));
            slowest = slowest.max(took);
            let best = out.records.iter().filter_map(|r| r.eval.map(|e| e.mean)).fold(f64::MIN, f64::max);
            if let Some(ep) = out.converged_at {
                solved += 1;
                cells.push(format!("seed {seed}: eval >= 195 at episode {ep} ({:.1}s)", took.as_secs_f64()));
            } else {
                cells.push(format!("seed {seed}: best eval {best:.1} ({:.1}s)", took.as_secs_f64()));
            }
        }
        verdict(
            solved >= 1 && slowest <= Duration::from_secs(600),
            format!("{solved}/3 seeds solved within {EPISODE_LIMIT} episodes; {}", cells.join(", ")),
        )
    });

    suite.check("PER sampling distribution", per_distribution);
    suite.check("sum tree matches linear-scan oracle", sum_tree_oracle);
    suite.check("analytic gradients match finite differences", gradient_check);
    suite.check("DQN on toy MDP matches value iteration", dqn_toy_mdp);

    suite.check("CER latest transition leads every batch", || {
        let mut batches = 0;
        let mut led = 0;
        for run in &cer_runs {
            batches += run.stats.batches;
            led += run.stats.batches_led_by_latest;
        }
        verdict(
            batches > 0 && led == batches,
            format!("{led}/{batches} batches over {} full CartPole runs", cer_runs.len()),
        )
    });

    suite.check("HER storage accounting and relabel semantics", her_checks);
    suite.check("pendulum reward formula and OU noise spread", pendulum_and_noise);
    suite.check("soft target update algebra", soft_update_algebra);
    suite.check("identical CSV for repeated (config, seed)", csv_determinism);

    if suite.failures == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}

fn dummy(i: usize) -> Transition {
    Transition::new(vec![i as f64], Action::Discrete(0), 0.0, vec![i as f64 + 1.0], false)
}

fn per_distribution() -> Verdict {
    // Raw priorities |δ|+ε of 3 and 1 with α=1.
    let cfg = PerConfig { alpha: 1.0, beta: 0.4, epsilon: 0.01, max_priority_init: 1.0 };
    let mut stack = ReplayStack::new(2, false, Some(cfg)).map_err(|e| e.to_string())?;
    stack.push(dummy(0)).unwrap();
    stack.push(dummy(1)).unwrap();
    stack.update_priorities(&[0, 1], &[2.99, -0.99]).unwrap();
    let mut rng = seeded(11);
    let draws = 1_000_000;
    let mut first = 0usize;
    for _ in 0..draws {
        if stack.sample(1, &mut rng).unwrap()[0].index == 0 {
            first += 1;
        }
    }
    let f0 = first as f64 / draws as f64;
    let f1 = 1.0 - f0;
    let freq_ok = (f0 - 0.75).abs() <= 0.005 && (f1 - 0.25).abs() <= 0.005;

    // α=0 must be uniform whatever the TD errors are.
    let k = 10;
    let cfg0 = PerConfig { alpha: 0.0, ..cfg };
    let mut stack = ReplayStack::new(k, false, Some(cfg0)).unwrap();
    for i in 0..k {
        stack.push(dummy(i)).unwrap();
    }
    let idx: Vec<usize> = (0..k).collect();
    let td: Vec<f64> = (0..k).map(|i| (i * i) as f64 * 0.7).collect();
    stack.update_priorities(&idx, &td).unwrap();
    let n = 100_000;
    let mut counts = vec![0usize; k];
    for _ in 0..n {
        counts[stack.sample(1, &mut rng).unwrap()[0].index] += 1;
    }
    let expected = n as f64 / k as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new((k - 1) as f64).unwrap().inverse_cdf(0.99);
    verdict(
        freq_ok && chi2 < critical,
        format!("[3,1] α=1 frequencies {f0:.4}/{f1:.4} over 10^6 draws; α=0 chi2 {chi2:.2} < {critical:.2} (df {})", k - 1),
    )
}

fn oracle_sample(values: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        acc += v;
        if acc > u {
            return i;
        }
    }
    unreachable!("u below total")
}

fn sum_tree_oracle() -> Verdict {
    // Values and sample points are multiples of 1/8 so every partial sum is
    // exact and the tree and the scan must agree to the bit.
    let mut rng = seeded(3);
    let sequences = 10_000;
    let mut samples_checked = 0usize;
    let mut worst_rel = 0.0f64;
    for seq in 0..sequences {
        let cap = rng.gen_range(1..=48);
        let mut tree = SumTree::new(cap).unwrap();
        let mut oracle = vec![0.0; cap];
        let mut cursor = 0;
        for _ in 0..40 {
            match rng.gen_range(0..3) {
                0 => {
                    let i = rng.gen_range(0..cap);
                    let v = rng.gen_range(0..=80) as f64 / 8.0;
                    tree.set(i, v).unwrap();
                    oracle[i] = v;
                }
                1 => {
                    let v = rng.gen_range(1..=80) as f64 / 8.0;
                    tree.set(cursor, v).unwrap();
                    oracle[cursor] = v;
                    cursor = (cursor + 1) % cap;
                }
                _ => {
                    let total: f64 = oracle.iter().sum();
                    if tree.total() != total {
                        return Err(format!("sequence {seq}: total {} vs oracle {total}", tree.total()));
                    }
                    if total > 0.0 {
                        let u = rng.gen_range(0..(total * 8.0) as u64) as f64 / 8.0;
                        let (got, want) = (tree.sample(u).unwrap(), oracle_sample(&oracle, u));
                        if got != want {
                            return Err(format!("sequence {seq}: u={u} tree picked {got}, oracle {want}"));
                        }
                        samples_checked += 1;
                    }
                }
            }
            let nodes = tree.nodes();
            let internal = tree.leaf_capacity() - 1;
            for p in 0..internal {
                let sum = nodes[2 * p + 1] + nodes[2 * p + 2];
                let rel = (nodes[p] - sum).abs() / sum.abs().max(f64::MIN_POSITIVE);
                worst_rel = worst_rel.max(if sum == 0.0 { nodes[p].abs() } else { rel });
            }
            for (i, v) in oracle.iter().enumerate() {
                if tree.leaf(i).unwrap() != *v {
                    return Err(format!("sequence {seq}: leaf {i} differs"));
                }
            }
        }
    }
    verdict(
        worst_rel <= 1e-9,
        format!("{sequences} sequences, {samples_checked} samples agree; worst node-sum relative error {worst_rel:e}"),
    )
}

fn loss(net: &Mlp, x: &Array2<f64>, c: &Array2<f64>) -> f64 {
    let (y, _) = net.forward_batch(x.view()).unwrap();
    (&y * c).sum()
}

fn rel_err(a: &[f64], n: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(n).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt() + n.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn gradient_check() -> Verdict {
    let h = 1e-5;
    let mut rng = seeded(21);
    let mut worst_param = 0.0f64;
    let mut worst_input = 0.0f64;
    for _ in 0..100 {
        let depth = rng.gen_range(1..=3);
        let mut sizes = vec![rng.gen_range(1..=6)];
        for _ in 0..depth {
            sizes.push(rng.gen_range(1..=8));
        }
        let hidden = if rng.gen_bool(0.5) { Activation::Tanh } else { Activation::Relu };
        let output = if rng.gen_bool(0.5) {
            OutputActivation::Identity
        } else {
            OutputActivation::ScaledTanh(rng.gen_range(0.5..3.0))
        };
        let net = Mlp::new(&sizes, hidden, output, &mut rng).unwrap();
        let batch = 3;
        let x = Array2::from_shape_fn((batch, sizes[0]), |_| rng.gen_range(-1.5..1.5));
        let c = Array2::from_shape_fn((batch, net.output_dim()), |_| rng.gen_range(-1.0..1.0));
        let (_, cache) = net.forward_batch(x.view()).unwrap();
        let (grads, dx) = net.backward(&cache, c.view()).unwrap();

        let theta = net.flatten();
        let mut probe = net.clone();
        let mut numeric = Vec::with_capacity(theta.len());
        for i in 0..theta.len() {
            let mut t = theta.clone();
            t[i] = theta[i] + h;
            probe.set_flat(&t).unwrap();
            let up = loss(&probe, &x, &c);
            t[i] = theta[i] - h;
            probe.set_flat(&t).unwrap();
            let down = loss(&probe, &x, &c);
            numeric.push((up - down) / (2.0 * h));
        }
        worst_param = worst_param.max(rel_err(&grads.flatten(), &numeric));

        let mut numeric_x = Vec::new();
        for i in 0..x.len() {
            let mut xp = x.clone();
            let (r, col) = (i / x.ncols(), i % x.ncols());
            xp[[r, col]] += h;
            let up = loss(&net, &xp, &c);
            xp[[r, col]] -= 2.0 * h;
            let down = loss(&net, &xp, &c);
            numeric_x.push((up - down) / (2.0 * h));
        }
        worst_input = worst_input.max(rel_err(&dx.iter().copied().collect::<Vec<_>>(), &numeric_x));
    }
    verdict(
        worst_param < 1e-4 && worst_input < 1e-4,
        format!("100 networks, worst relative error: parameters {worst_param:.2e}, inputs {worst_input:.2e}"),
    )
}

fn dqn_toy_mdp() -> Verdict {
    // s0: a0 stays (r 0), a1 -> s1 (r 1); s1: a0 stays (r 2), a1 -> s0 (r 0).
    let gamma = 0.9;
    let next = [[0usize, 1], [1, 0]];
    let reward = [[0.0, 1.0], [2.0, 0.0]];
    let mut q_star = [[0.0f64; 2]; 2];
    for _ in 0..2000 {
        let v = [q_star[0][0].max(q_star[0][1]), q_star[1][0].max(q_star[1][1])];
        for s in 0..2 {
            for a in 0..2 {
                q_star[s][a] = reward[s][a] + gamma * v[next[s][a]];
            }
        }
    }
    let one_hot = |s: usize| if s == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
    let mut stack = ReplayStack::new(16, false, None).unwrap();
    for s in 0..2 {
        for a in 0..2 {
            stack
                .push(Transition::new(one_hot(s), Action::Discrete(a), reward[s][a], one_hot(next[s][a]), false))
                .unwrap();
        }
    }
    let cfg = DqnConfig { gamma, lr: 3e-3, target_period: 100, batch_size: 32, hidden: vec![], ..Default::default() };
    let mut agent = DqnAgent::new(cfg, Encoder::identity(2), 2, &mut seeded(5)).unwrap();
    let mut rng = seeded(6);
    let updates = 60_000;
    for _ in 0..updates {
        let batch = stack.sample(32, &mut rng).unwrap();
        agent.learn(&batch).map_err(|e| e.to_string())?;
    }
    let mut worst = 0.0f64;
    let mut learned = Vec::new();
    for s in 0..2 {
        let q = agent.online.predict(&one_hot(s)).unwrap();
        for a in 0..2 {
            worst = worst.max((q[a] - q_star[s][a]).abs());
        }
        learned.push(format!("[{:.4}, {:.4}]", q[0], q[1]));
    }
    verdict(
        worst <= 1e-2,
        format!(
            "Q* = [[{:.2}, {:.2}], [{:.2}, {:.2}]], learned {} after {updates} updates; max error {worst:.2e}",
            q_star[0][0],
            q_star[0][1],
            q_star[1][0],
            q_star[1][1],
            learned.join(", ")
        ),
    )
}

fn her_checks() -> Verdict {
    // Storage: a short goal-conditioned training run.
    let mut cfg = RunConfig::new(EnvKind::MountainCar, AgentKind::Dqn)
        .with_flags(StrategyFlags { hindsight: true, ..Default::default() });
    cfg.episodes = 20;
    cfg.eval_interval = 0;
    cfg.dqn.warmup = 500;
    let out = train(build_run(cfg).unwrap()).map_err(|e| e.to_string())?;
    let storage_ok = out.stats.storage.iter().all(|(len, stored)| *stored == 2 * len);
    let stored: usize = out.stats.storage.iter().map(|s| s.1).sum();
    let steps: usize = out.stats.storage.iter().map(|s| s.0).sum();

    // Relabeled final transitions of random-policy episodes.
    let spec = goal_spec_for(EnvKind::MountainCar, None).unwrap();
    let goal = spec.native_goal();
    let mut rng = seeded(8);
    let mut env = EnvKind::MountainCar.make();
    let mut finals_ok = true;
    let episodes = 50;
    for _ in 0..episodes {
        let mut state = env.reset(&mut rng);
        let mut ts = Vec::new();
        loop {
            let a = Action::Discrete(rng.gen_range(0..3));
            let r = env.step(&a).unwrap();
            ts.push(Transition::new(state, a, r.reward, r.next_state.clone(), r.done).with_goal(goal.clone()));
            if r.episode_over() {
                break;
            }
            state = r.next_state;
        }
        let n = ts.len();
        let all = relabel_episode(&Episode::new(ts).unwrap(), spec.as_ref());
        let last = &all[2 * n - 1];
        let (_, success) = spec.transition_reward(last, last.goal.as_ref().unwrap());
        finals_ok &= all.len() == 2 * n && last.done && success && last.reward == 0.0;
    }

    // Native goal reproduces native reward and termination.
    let mut mismatches = 0;
    let trials = 10_000;
    let mut reached = 0;
    for i in 0..trials {
        let pos = if i % 2 == 0 { rng.gen_range(-1.2..0.6) } else { rng.gen_range(0.4..0.6) };
        let vel = rng.gen_range(-0.07..0.07);
        let action = Action::Discrete(rng.gen_range(0..3));
        let mut car = MountainCar::new();
        car.reset(&mut rng);
        car.set_state([pos, vel]);
        let r = car.step(&action).unwrap();
        let t = Transition::new(vec![pos, vel], action, r.reward, r.next_state.clone(), r.done);
        let (reward, success) = spec.transition_reward(&t, &goal);
        reached += usize::from(r.done);
        if reward != r.reward || success != r.done {
            mismatches += 1;
        }
    }
    verdict(
        storage_ok && finals_ok && mismatches == 0,
        format!(
            "{stored} stored for {steps} steps over 20 episodes; {episodes} relabeled finals succeed with reward 0: {finals_ok}; \
             native-goal mismatches {mismatches}/{trials} ({reached} reaching the goal)"
        ),
    )
}

fn pendulum_and_noise() -> Verdict {
    let mut rng = seeded(13);
    let trials = 10_000;
    let mut worst = 0.0f64;
    let mut env_worst = 0.0f64;
    for _ in 0..trials {
        let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let thdot = rng.gen_range(-8.0..8.0);
        let a = rng.gen_range(-2.0..2.0);
        let expected = -(theta * theta + 0.1 * thdot * thdot + 0.001 * a * a);
        worst = worst.max((pendulum_reward(theta, thdot, a) - expected).abs() / expected.abs().max(1.0));
        // Through the environment, starting from an unwrapped angle. The env
        // recovers θ from (cos θ, sin θ), costing a few ulps.
        let mut p = Pendulum::new();
        p.reset(&mut rng);
        let turns = rng.gen_range(-2..=2) as f64 * 2.0 * std::f64::consts::PI;
        p.set_state(theta + turns, thdot);
        let r = p.step(&Action::Continuous(vec![a])).unwrap();
        let w = wrap_angle(theta + turns);
        let expected_env = -(w * w + 0.1 * thdot * thdot + 0.001 * a * a);
        env_worst = env_worst.max((r.reward - expected_env).abs() / expected_env.abs().max(1.0));
    }
    let (theta, sigma) = (0.15, 0.2);
    let mut ou = OuNoise::new(1, theta, sigma, 0.0);
    let steps = 1_000_000;
    let burn = 1000;
    let (mut sum, mut sq) = (0.0, 0.0);
    for i in 0..steps + burn {
        let x = ou.sample(&mut rng)[0];
        if i >= burn {
            sum += x;
            sq += x * x;
        }
    }
    let mean = sum / steps as f64;
    let std = (sq / steps as f64 - mean * mean).sqrt();
    let target = sigma / (2.0 * theta).sqrt();
    let rel = (std - target).abs() / target;
    verdict(
        worst <= 1e-15 && env_worst <= 1e-14 && rel <= 0.10,
        format!(
            "reward max relative error {worst:.1e} (direct), {env_worst:.1e} (via env) over {trials} tuples; \
             OU std {std:.4} vs {target:.4} ({:.1}% off)",
            rel * 100.0
        ),
    )
}

fn soft_update_algebra() -> Verdict {
    let mut rng = seeded(17);
    let online = Mlp::new(&[4, 16, 3], Activation::Relu, OutputActivation::Identity, &mut rng).unwrap();
    let target0 = Mlp::new(&[4, 16, 3], Activation::Relu, OutputActivation::Identity, &mut rng).unwrap();
    let (o, t0) = (online.flatten(), target0.flatten());

    let mut t = target0.clone();
    t.soft_update_from(&online, 0.0).unwrap();
    let zero_ok = t.flatten() == t0;
    let mut t = target0.clone();
    t.soft_update_from(&online, 1.0).unwrap();
    let one_ok = t.flatten() == o;
    let mut t = target0.clone();
    t.soft_update_from(&online, 0.5).unwrap();
    let half_ok = t.flatten().iter().zip(o.iter().zip(&t0)).all(|(v, (o, t))| *v == 0.5 * o + 0.5 * t);

    // Each update rounds with error about ε·‖θ‖, so the step ratio is only
    // meaningful while the distance is far above that; the absolute
    // contraction error is checked on every step.
    let norm_o = o.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dist = |a: &[f64]| a.iter().zip(&o).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut worst_ratio = 0.0f64;
    let mut worst_abs = 0.0f64;
    let mut ratio_steps = 0;
    for tau in [0.001, 0.005, 0.1, 0.5] {
        let mut t = target0.clone();
        let mut prev = dist(&t.flatten());
        for _ in 0..50 {
            t.soft_update_from(&online, tau).unwrap();
            let d = dist(&t.flatten());
            worst_abs = worst_abs.max((d - (1.0 - tau) * prev).abs());
            if prev >= 1e-3 * norm_o {
                worst_ratio = worst_ratio.max((d / prev - (1.0 - tau)).abs());
                ratio_steps += 1;
            }
            prev = d;
        }
    }
    verdict(
        zero_ok && one_ok && half_ok && worst_ratio <= 1e-12 && worst_abs <= 1e-12,
        format!(
            "tau 0/0.5/1 exact: {zero_ok}/{half_ok}/{one_ok}; factor deviation {worst_ratio:.1e} over {ratio_steps} \
             well-conditioned steps, distance deviation {worst_abs:.1e} over 200 steps"
        ),
    )
}

fn csv_determinism() -> Verdict {
    let mut configs = Vec::new();
    let mut cp = RunConfig::new(EnvKind::CartPole, AgentKind::Dqn)
        .with_flags(StrategyFlags { combined: true, prioritized: true, hindsight: false });
    cp.seed = 9;
    cp.episodes = 80;
    cp.eval_interval = 20;
    cp.eval_episodes = 10;
    cp.eval_threads = 3;
    configs.push(cp);
    let mut mc = RunConfig::new(EnvKind::MountainCar, AgentKind::Dqn)
        .with_flags(StrategyFlags { combined: false, prioritized: true, hindsight: true });
    mc.seed = 4;
    mc.episodes = 12;
    mc.eval_interval = 6;
    mc.eval_episodes = 3;
    configs.push(mc);
    let mut pd = RunConfig::new(EnvKind::Pendulum, AgentKind::Ddpg)
        .with_flags(StrategyFlags { combined: true, prioritized: false, hindsight: true });
    pd.seed = 2;
    pd.episodes = 8;
    pd.eval_interval = 4;
    pd.eval_episodes = 3;
    configs.push(pd);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for (i, cfg) in configs.into_iter().enumerate() {
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = train(build_run(cfg.clone()).unwrap()).map_err(|e| e.to_string())?;
            let path = dir.path().join(format!("{i}-{run}.csv"));
            xreplay::harness::emit_csv(&out.records, &path).map_err(|e| e.to_string())?;
            bytes.push(std::fs::read(&path).unwrap());
            debug_assert_eq!(bytes[run], format_csv(&out.records).into_bytes());
        }
        let same = bytes[0] == bytes[1];
        ok &= same;
        details.push(format!("{} {}: {} bytes {}", cfg.env, cfg.flags.label(), bytes[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    verdict(ok, details.join("; "))
}
