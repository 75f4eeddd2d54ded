use rand::Rng;
use rand_distr::{Distribution, Normal};
use quadlab::agent::Batch;
use quadlab::rng::seeded;
use quadlab::{ReplayBuffer, Td3Agent, Td3Config, Transition};

mod common;
use common::mlp_oracle;

fn small_config() -> Td3Config {
    Td3Config {
        hidden_widths: vec![16, 16],
        batch_size: 64,
        ..Td3Config::default()
    }
}

fn random_transitions(n: usize, sd: usize, ad: usize, seed: u64) -> Vec<Transition> {
    let mut rng = seeded(seed);
    (0..n)
        .map(|i| Transition {
            z: (0..sd).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            a: (0..ad).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            r: rng.gen_range(-2.0..2.0),
            z_next: (0..sd).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            done: i % 7 == 0,
        })
        .collect()
}

#[test]
fn critic_target_matches_formula_oracle() {
    let (sd, ad) = (6, 3);
    let cfg = small_config();
    let agent = Td3Agent::new(sd, ad, cfg.clone(), &mut seeded(1)).unwrap();
    let ts = random_transitions(64, sd, ad, 2);
    let batch = Batch::from_transitions(&ts).unwrap();
    let got = agent.compute_critic_target(&batch, &mut seeded(3)).unwrap();

    let (actor_t, c1_t, c2_t) = agent.targets();
    let mut noise_rng = seeded(3);
    let noise = Normal::new(0.0, cfg.target_noise_sigma).unwrap();
    for (i, t) in ts.iter().enumerate() {
        let mut a = mlp_oracle(actor_t, &t.z_next);
        for v in &mut a {
            let eps: f64 = noise.sample(&mut noise_rng);
            *v = (*v + eps.clamp(-cfg.target_noise_clip, cfg.target_noise_clip)).clamp(-1.0, 1.0);
        }
        let mut input = t.z_next.clone();
        input.extend_from_slice(&a);
        let q = mlp_oracle(c1_t, &input)[0].min(mlp_oracle(c2_t, &input)[0]);
        let done = if t.done { 1.0 } else { 0.0 };
        let y = t.r + cfg.gamma * (1.0 - done) * q;
        assert!((got[i] - y).abs() < 1e-12, "row {i}: {} vs {y}", got[i]);
    }
}

#[test]
fn critic_loss_decreases_on_frozen_batch() {
    let (sd, ad) = (5, 2);
    let mut cfg = small_config();
    cfg.critic_lr = 1e-4;
    let mut agent = Td3Agent::new(sd, ad, cfg, &mut seeded(4)).unwrap();
    let batch = Batch::from_transitions(&random_transitions(64, sd, ad, 5)).unwrap();
    let targets: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
    let mut prev = f64::INFINITY;
    let mut non_increasing = 0;
    for _ in 0..101 {
        let (l1, _) = agent.train_critics(&batch, &targets).unwrap();
        if l1 <= prev {
            non_increasing += 1;
        }
        prev = l1;
    }
    // the first comparison is against infinity
    assert!(non_increasing - 1 >= 95, "{} of 100", non_increasing - 1);
}

#[test]
fn actor_step_does_not_decrease_critic_value() {
    let (sd, ad) = (5, 2);
    for seed in 0..10 {
        let mut cfg = small_config();
        cfg.actor_lr = 1e-4;
        let mut agent = Td3Agent::new(sd, ad, cfg, &mut seeded(seed)).unwrap();
        let batch = Batch::from_transitions(&random_transitions(64, sd, ad, 100 + seed)).unwrap();
        let mean_q = |agent: &Td3Agent| {
            let (c1, _) = agent.critics();
            (0..batch.len)
                .map(|i| {
                    let z = &batch.z[i * sd..(i + 1) * sd];
                    let mut input = z.to_vec();
                    input.extend(agent.actor().forward(z).unwrap());
                    c1.forward(&input).unwrap()[0]
                })
                .sum::<f64>()
                / batch.len as f64
        };
        let before = mean_q(&agent);
        agent.train_actor(&batch.z, batch.len).unwrap();
        let after = mean_q(&agent);
        assert!(after >= before - 1e-12, "seed {seed}: {before} -> {after}");
    }
}

/// One state, one action, reward −(a − 0.5)², every step terminal.
fn quadratic_sanity(seed: u64) -> f64 {
    let cfg = Td3Config {
        hidden_widths: vec![32, 32],
        actor_lr: 1e-3,
        critic_lr: 1e-3,
        batch_size: 64,
        buffer_capacity: 10_000,
        exploration_sigma: 0.3,
        ..Td3Config::default()
    };
    let mut rng = seeded(seed);
    let mut agent = Td3Agent::new(1, 1, cfg, &mut rng).unwrap();
    let mut buf = ReplayBuffer::new(10_000, 1, 1).unwrap();
    let z = [1.0];
    for step in 0..5_000 + 64 {
        let a = if step < 64 {
            vec![rng.gen_range(-1.0..1.0)]
        } else {
            agent.select_action(&z, true, &mut rng).unwrap()
        };
        let r = -(a[0] - 0.5) * (a[0] - 0.5);
        buf.push(&Transition {
            z: z.to_vec(),
            a,
            r,
            z_next: z.to_vec(),
            done: true,
        })
        .unwrap();
        if step >= 64 {
            agent.update(&buf, &mut rng).unwrap();
        }
    }
    agent.select_action(&z, false, &mut rng).unwrap()[0]
}

#[test]
fn td3_finds_quadratic_optimum() {
    let hits = (0..5).filter(|&s| (quadratic_sanity(s) - 0.5).abs() < 0.1).count();
    assert!(hits >= 4, "{hits}/5 seeds within 0.1 of the optimum");
}

#[test]
fn targets_start_equal_and_contract() {
    let mut agent = Td3Agent::new(4, 2, small_config(), &mut seeded(9)).unwrap();
    assert_eq!(agent.max_target_gap(), 0.0);
    for p in agent.actor_mut().params_mut() {
        *p += 0.5;
    }
    let mut prev = agent.max_target_gap();
    for _ in 0..50 {
        agent.soft_update_targets().unwrap();
        let gap = agent.max_target_gap();
        assert!(gap < prev);
        prev = gap;
    }
}

#[test]
fn exploration_noise_is_centered() {
    let agent = Td3Agent::new(3, 2, small_config(), &mut seeded(11)).unwrap();
    let z = [0.1, -0.2, 0.3];
    let det = agent.select_action(&z, false, &mut seeded(0)).unwrap();
    let mut rng = seeded(12);
    let n = 10_000;
    let mut mean = [0.0; 2];
    for _ in 0..n {
        let a = agent.select_action(&z, true, &mut rng).unwrap();
        for k in 0..2 {
            mean[k] += a[k] / n as f64;
        }
    }
    for k in 0..2 {
        assert!((mean[k] - det[k]).abs() < 5.0 * 0.1 / (n as f64).sqrt());
    }
}
