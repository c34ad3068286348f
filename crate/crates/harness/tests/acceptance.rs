//! End to end acceptance checks. Each test pins one release criterion and
//! prints a single PASS or FAIL line for it.

// Gate comparisons are written negated (`!(x <= bound)`) so a NaN metric
// fails the criterion instead of slipping past it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenesync_core::geometry::{drift_angle, MotionKind};
use scenesync_core::net::{decode, encode, Message, ProtocolError, MAX_DATAGRAM};
use scenesync_core::scene::{
    classify_tempo, upshot_frequency, ActionDescriptor, ActionId, ActionTrace,
    ControlPacketObject, NodeId, ObjectId, Tempo, TraceEntry,
};
use scenesync_core::{Posed, Quaterniond, Vec3d};
use scenesync_harness::report::DriftSample;
use scenesync_harness::{probe_demo, run_scenario, scalability, Scalability, ScenarioConfig};
use std::time::{Duration, Instant};

fn criterion(n: u32, name: &str, budget: Option<Duration>, body: impl FnOnce() -> Result<(), String>) {
    let started = Instant::now();
    let mut result = body();
    let elapsed = started.elapsed();
    if result.is_ok() {
        if let Some(cap) = budget {
            if elapsed > cap {
                result = Err(format!("took {elapsed:?}, budget {cap:?}"));
            }
        }
    }
    match result {
        Ok(()) => println!("criterion {n} ({name}): PASS"),
        Err(e) => {
            println!("criterion {n} ({name}): FAIL: {e}");
            panic!("criterion {n} ({name}) failed: {e}");
        }
    }
}

fn scenario(text: &str) -> Result<ScenarioConfig, String> {
    ScenarioConfig::parse(text).map_err(|e| e.to_string())
}

fn mean_alpha(samples: &[DriftSample]) -> f64 {
    samples.iter().map(|s| s.alpha_deg).sum::<f64>() / samples.len() as f64
}

fn block_mean(samples: &[DriftSample], velocity: f64) -> f64 {
    let block: Vec<f64> = samples
        .iter()
        .filter(|s| s.velocity_dps == velocity)
        .map(|s| s.alpha_deg)
        .collect();
    block.iter().sum::<f64>() / block.len() as f64
}

#[test]
fn criterion_01_ideal_sync_exactness() {
    criterion(1, "ideal sync exactness", Some(Duration::from_secs(1)), || {
        let cfg = scenario(
            "seed = 1201\nnodes = 2\nbase_delay_s = 0.00075\njitter = none\nsync = on\n\
             velocities_dps = 10,50,100\nactions_per_velocity = 24\n",
        )?;
        let outcome = run_scenario(&cfg).map_err(|e| e.to_string())?;
        if outcome.samples.len() != 72 {
            return Err(format!("expected 72 samples, got {}", outcome.samples.len()));
        }
        for s in &outcome.samples {
            if !(s.alpha_deg <= 1e-6) {
                return Err(format!(
                    "sample {} at {} deg/s drifted {} deg (limit 1e-6)",
                    s.sample_index, s.velocity_dps, s.alpha_deg
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_02_sync_benefit_ratio() {
    criterion(2, "sync benefit ratio", Some(Duration::from_secs(5)), || {
        let base = "seed = 77\nnodes = 2\nbase_delay_s = 0.005\njitter = uniform:0.0005\n\
                    velocities_dps = 100\nactions_per_velocity = 24\n";
        let off = run_scenario(&scenario(&format!("{base}sync = off\n"))?)
            .map_err(|e| e.to_string())?;
        let on = run_scenario(&scenario(&format!("{base}sync = on\n"))?)
            .map_err(|e| e.to_string())?;
        let ratio = mean_alpha(&off.samples) / mean_alpha(&on.samples);
        if ratio < 10.0 {
            return Err(format!(
                "off/on drift ratio {ratio} < 10 (off {}, on {})",
                mean_alpha(&off.samples),
                mean_alpha(&on.samples)
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_03_velocity_monotonicity() {
    criterion(3, "velocity monotonicity", Some(Duration::from_secs(10)), || {
        for seed in [11u64, 23, 37, 41, 53] {
            let cfg = scenario(&format!(
                "seed = {seed}\nnodes = 2\nsync = off\nbase_delay_s = 0.005\n\
                 jitter = uniform:0.0005\nvelocities_dps = 10,50,100\nactions_per_velocity = 24\n"
            ))?;
            let outcome = run_scenario(&cfg).map_err(|e| e.to_string())?;
            let m10 = block_mean(&outcome.samples, 10.0);
            let m50 = block_mean(&outcome.samples, 50.0);
            let m100 = block_mean(&outcome.samples, 100.0);
            if !(m10 < m50 && m50 < m100) {
                return Err(format!(
                    "seed {seed}: means not strictly increasing: {m10}, {m50}, {m100}"
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_04_delay_velocity_equivalence() {
    criterion(4, "delay velocity equivalence", Some(Duration::from_secs(5)), || {
        let fast = run_scenario(&scenario(
            "seed = 4242\nnodes = 2\nsync = off\nvelocities_dps = 100\n\
             base_delay_s = 0.0015\njitter = uniform:0.0005\nactions_per_velocity = 24\n",
        )?)
        .map_err(|e| e.to_string())?;
        let slow = run_scenario(&scenario(
            "seed = 4242\nnodes = 2\nsync = off\nvelocities_dps = 10\n\
             base_delay_s = 0.015\njitter = uniform:0.005\nactions_per_velocity = 24\n",
        )?)
        .map_err(|e| e.to_string())?;
        let a = mean_alpha(&fast.samples);
        let b = mean_alpha(&slow.samples);
        let gap = (a - b).abs() / b;
        if gap > 0.05 {
            return Err(format!(
                "fast-link mean {a} vs slow-link mean {b}: relative gap {gap} > 5%"
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_05_scalability() {
    criterion(5, "scalability", Some(Duration::from_secs(10)), || {
        let base = "seed = 555\nsync = on\nbase_delay_s = 0.005\njitter = uniform:0.0005\n\
                    velocities_dps = 10,50,100\nactions_per_velocity = 24\n";
        let two = run_scenario(&scenario(&format!("{base}nodes = 2\n"))?)
            .map_err(|e| e.to_string())?;
        let five = run_scenario(&scenario(&format!("{base}nodes = 5\n"))?)
            .map_err(|e| e.to_string())?;
        let report =
            scalability(&[two.samples, five.samples]).map_err(|e| e.to_string())?;
        let psi_1 = report.psi[&1];
        let psi_4 = report.psi[&4];
        if report.ratio > 1.5 {
            return Err(format!("psi_4/psi_1 = {} > 1.5", report.ratio));
        }
        if !(psi_4 < 4.0 * psi_1) {
            return Err(format!("psi_4 {psi_4} not well under 4 * psi_1 = {}", 4.0 * psi_1));
        }
        if report.verdict != Scalability::High {
            return Err("verdict was not high scalability".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_06_adaptive_probe_behavior() {
    criterion(6, "adaptive probe behavior", Some(Duration::from_secs(2)), || {
        // Quiet link: the rate must relax to its floor and spend far fewer
        // probes than fixed mode does over the same minute.
        let quiet = "seed = 606\nnodes = 2\nbase_delay_s = 0.005\njitter = none\n\
                     duration_s = 60\nprobe_window = 6\nboot_probes = 5\n\
                     gamma_start = 1\ngamma_min = 0.1\ngamma_max = 20\n";
        let adaptive =
            probe_demo(&scenario(quiet)?).map_err(|e| e.to_string())?;
        let fixed = probe_demo(&scenario(&format!("{quiet}probe_mode = fixed\n"))?)
            .map_err(|e| e.to_string())?;
        if adaptive.final_gamma != 0.1 {
            return Err(format!(
                "adaptive rate settled at {} rather than the 0.1 floor",
                adaptive.final_gamma
            ));
        }
        let share = adaptive.probes_sent as f64 / fixed.probes_sent as f64;
        if share >= 0.25 {
            return Err(format!(
                "adaptive sent {} probes vs fixed {}: {share} of fixed, limit 25%",
                adaptive.probes_sent, fixed.probes_sent
            ));
        }

        // Delay step far outside the learned band: the rate must climb to its
        // ceiling within one doubling per decision.
        let stepped = probe_demo(&scenario(
            "seed = 607\nnodes = 2\nbase_delay_s = 0.0015\njitter = none\nduration_s = 60\n\
             probe_window = 20\nboot_probes = 20\ngamma_start = 1\ngamma_min = 0.2\n\
             gamma_max = 20\nstep_time_s = 20\nstep_delay_s = 0.005\n",
        )?)
        .map_err(|e| e.to_string())?;
        let before = stepped
            .points
            .iter()
            .rev()
            .find(|p| p.time_s < 20.0)
            .ok_or("no probe landed before the step")?;
        let budget = (20.0 / before.gamma0_per_s).log2().ceil() as usize;
        let decisions = stepped
            .points
            .iter()
            .filter(|p| p.time_s > 20.0)
            .position(|p| p.gamma0_per_s == 20.0)
            .ok_or("rate never reached its ceiling after the step")?
            + 1;
        if decisions > budget {
            return Err(format!(
                "needed {decisions} decisions to reach the ceiling, budget {budget}"
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_07_orientation_drift_oracle() {
    criterion(7, "orientation drift oracle", Some(Duration::from_secs(1)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(7007);
        let random_quat = |rng: &mut ChaCha8Rng| -> Result<Quaterniond, String> {
            let axis = loop {
                let v = Vec3d::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() > 1e-3 {
                    break v.scaled(1.0 / v.norm());
                }
            };
            Quaterniond::from_axis_angle(axis, rng.random_range(0.0..360.0))
                .map_err(|e| e.to_string())
        };
        for i in 0..1000 {
            let a = random_quat(&mut rng)?;
            let b = random_quat(&mut rng)?;
            let measured = drift_angle(a, b).degrees();
            let ma = a.rotation_matrix();
            let mb = b.rotation_matrix();
            // Trace of ma * mb^T: row r of ma dotted with row r of mb.
            let trace: f64 = (0..3)
                .map(|r| (0..3).map(|k| ma[r][k] * mb[r][k]).sum::<f64>())
                .sum();
            let oracle = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos().to_degrees();
            if (measured - oracle).abs() > 1e-9 {
                return Err(format!(
                    "pair {i}: drift angle {measured} vs matrix oracle {oracle}"
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_08_capacity_spot_values() {
    criterion(8, "capacity spot values", None, || {
        let ten = upshot_frequency(0.1).map_err(|e| e.to_string())?;
        if ten != 10.0 {
            return Err(format!("1/0.1 came out as {ten}"));
        }
        let odd = upshot_frequency(0.24).map_err(|e| e.to_string())?;
        if (odd - 25.0 / 6.0).abs() > 1e-12 {
            return Err(format!("1/0.24 came out as {odd}"));
        }

        let mut trace = ActionTrace::default();
        for i in 1..=10u32 {
            trace.record(TraceEntry {
                action: ActionId(i),
                object: ObjectId(1),
                node: NodeId(1),
                time: 0.1 * i as f64,
            });
        }
        let report = classify_tempo(&trace, NodeId(1), 1.0, 1, 1.0, 0.1)
            .map_err(|e| e.to_string())?;
        if report.action_rate != report.capacity_rate {
            return Err(format!(
                "boundary case not exact: rate {} vs capacity {}",
                report.action_rate, report.capacity_rate
            ));
        }
        if report.tempo != Tempo::High {
            return Err("rate equal to capacity must classify as high".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_09_byte_identical_reruns() {
    criterion(9, "byte identical reruns", None, || {
        let bin = env!("CARGO_BIN_EXE_scenesync");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let conf = dir.path().join("scenario.conf");
        std::fs::write(
            &conf,
            "seed = 999\nnodes = 3\nbase_delay_s = 0.005\njitter = uniform:0.0005\n\
             sync = on\nvelocities_dps = 10,100\nactions_per_velocity = 6\n",
        )
        .map_err(|e| e.to_string())?;

        let mut outputs = Vec::new();
        for pass in ["one", "two"] {
            let out = dir.path().join(pass);
            let status = std::process::Command::new(bin)
                .args(["run", "--config"])
                .arg(&conf)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "run exited with {}: {}",
                    status.status,
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            let drift = std::fs::read(out.join("drift.csv")).map_err(|e| e.to_string())?;
            let summary = std::fs::read(out.join("summary.txt")).map_err(|e| e.to_string())?;
            outputs.push((drift, summary));
        }
        if outputs[0].0.is_empty() || outputs[0].0.len() < 100 {
            return Err("first run produced no meaningful csv".into());
        }
        if outputs[0].0 != outputs[1].0 {
            return Err("drift.csv differs between identical runs".into());
        }
        if outputs[0].1 != outputs[1].1 {
            return Err("summary.txt differs between identical runs".into());
        }

        let probe_conf = dir.path().join("probe.conf");
        std::fs::write(
            &probe_conf,
            "seed = 31\nbase_delay_s = 0.002\njitter = gaussian:0.0002\nduration_s = 30\n",
        )
        .map_err(|e| e.to_string())?;
        let mut series = Vec::new();
        for pass in ["p1", "p2"] {
            let out = dir.path().join(pass);
            let status = std::process::Command::new(bin)
                .args(["probe-demo", "--config"])
                .arg(&probe_conf)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("probe-demo exited with {}", status.status));
            }
            series.push(std::fs::read(out.join("probes.csv")).map_err(|e| e.to_string())?);
        }
        if series[0].is_empty() || series[0] != series[1] {
            return Err("probes.csv differs between identical runs".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_10_wire_round_trip() {
    criterion(10, "wire round trip", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1010);

        fn random_quat(rng: &mut ChaCha8Rng) -> Quaterniond {
            let axis = loop {
                let v = Vec3d::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if v.norm() > 1e-3 {
                    break v.scaled(1.0 / v.norm());
                }
            };
            Quaterniond::from_axis_angle(axis, rng.random_range(-360.0..360.0)).unwrap()
        }

        fn random_cpo(rng: &mut ChaCha8Rng) -> ControlPacketObject {
            ControlPacketObject {
                object_id: ObjectId(rng.random()),
                server_timestamp: rng.random_range(-1e6..1e6),
                pose: Posed::new(
                    Vec3d::new(
                        rng.random_range(-1e4..1e4),
                        rng.random_range(-1e4..1e4),
                        rng.random_range(-1e4..1e4),
                    ),
                    random_quat(rng),
                ),
                action: ActionDescriptor {
                    id: ActionId(rng.random()),
                    kind: if rng.random_bool(0.5) {
                        MotionKind::Rotation
                    } else {
                        MotionKind::Translation
                    },
                    direction: Vec3d::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ),
                    velocity: rng.random_range(-500.0..500.0),
                    start_time: rng.random_range(0.0..1e5),
                },
            }
        }

        for i in 0..100_000u32 {
            let msg = match rng.random_range(0..9u32) {
                0 => Message::Join,
                1 => Message::JoinAck {
                    objects: (0..rng.random_range(0..=12usize))
                        .map(|_| random_cpo(&mut rng))
                        .collect(),
                },
                2 => Message::LockRequest {
                    object: ObjectId(rng.random()),
                },
                3 => Message::LockGrant {
                    object: ObjectId(rng.random()),
                },
                4 => Message::LockDeny {
                    object: ObjectId(rng.random()),
                },
                5 => Message::StateUpdate(random_cpo(&mut rng)),
                6 => Message::ProbePing {
                    probe_id: rng.random(),
                    origin_time: rng.random_range(0.0..1e6),
                },
                7 => Message::ProbePong {
                    probe_id: rng.random(),
                    origin_time: rng.random_range(0.0..1e6),
                },
                _ => Message::LockRelease {
                    object: ObjectId(rng.random()),
                },
            };
            let sender = NodeId(rng.random());
            let bytes = encode(sender, &msg).map_err(|e| format!("message {i}: {e}"))?;
            if bytes.len() > MAX_DATAGRAM {
                return Err(format!("message {i} encoded to {} bytes", bytes.len()));
            }
            let (got_sender, got_msg) =
                decode(&bytes).map_err(|e| format!("message {i}: {e}"))?;
            if got_sender != sender || got_msg != msg {
                return Err(format!("message {i} did not round trip"));
            }
        }

        let valid = encode(NodeId(9), &Message::StateUpdate(random_cpo(&mut rng))).unwrap();

        type Rejection = (&'static str, Vec<u8>, fn(&ProtocolError) -> bool);
        let cases: Vec<Rejection> = vec![
            ("empty datagram", Vec::new(), |e| {
                matches!(e, ProtocolError::Truncated { .. })
            }),
            ("half a header", valid[..5].to_vec(), |e| {
                matches!(e, ProtocolError::Truncated { .. })
            }),
            (
                "unknown type byte",
                {
                    let mut b = valid.clone();
                    b[0] = 0x7F;
                    b
                },
                |e| matches!(e, ProtocolError::UnknownType { .. }),
            ),
            (
                "declared length beyond the buffer",
                {
                    let mut b = valid.clone();
                    b[5] = 0xFF;
                    b
                },
                |e| matches!(e, ProtocolError::Truncated { .. }),
            ),
            (
                "trailing garbage",
                {
                    let mut b = valid.clone();
                    b.push(0);
                    b
                },
                |e| matches!(e, ProtocolError::TrailingBytes { .. }),
            ),
            ("oversize datagram", vec![0x01; MAX_DATAGRAM + 1], |e| {
                matches!(e, ProtocolError::Oversize { .. })
            }),
            (
                "denormalized orientation",
                {
                    let mut b = valid.clone();
                    for byte in &mut b[45..77] {
                        *byte = 0;
                    }
                    b
                },
                |e| matches!(e, ProtocolError::NonUnitOrientation { .. }),
            ),
            (
                "unknown motion kind",
                {
                    let mut b = valid.clone();
                    b[81] = 9;
                    b
                },
                |e| matches!(e, ProtocolError::UnknownKind { .. }),
            ),
        ];
        for (what, bytes, check) in cases {
            match decode(&bytes) {
                Ok(_) => return Err(format!("{what} was accepted")),
                Err(e) if check(&e) => {}
                Err(e) => return Err(format!("{what} rejected with the wrong error: {e}")),
            }
        }
        Ok(())
    });
}
