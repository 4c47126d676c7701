//! Acceptance suite: one test per release criterion, each checked against
//! an oracle implemented independently of the library code path it
//! validates. Run with `cargo test --test acceptance -- --nocapture` to
//! see one line per criterion.

use std::collections::BTreeSet;
use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mapminer::clustering::{eagle_cluster, maximal_cliques, UndirectedView};
use mapminer::eventlog::write_log;
use mapminer::hmm::{baum_welch, forward, sample, viterbi, HmmModel, LengthLaw, ModelDocument};
use mapminer::kmeans::{kmeans_init_with, KMeansOptions};
use mapminer::mapbuilder::{build_pseudo_map, find_start_stop, prune_transitions};
use mapminer::metrics::{network_metrics, node_metrics};
use mapminer::synthgen::{generate_log, GroundTruthSpec};

fn random_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, m: usize) -> HmmModel {
    HmmModel::new(
        random_row(rng, n),
        (0..n).map(|_| random_row(rng, n)).collect(),
        (0..n).map(|_| random_row(rng, m)).collect(),
    )
    .unwrap()
}

/// Oracle: P(sequence) summed over every state path.
fn path_sum_likelihood(model: &HmmModel, seq: &[usize]) -> f64 {
    let n = model.n_states;
    let mut total = 0.0;
    let mut path = vec![0usize; seq.len()];
    loop {
        let mut p = model.pi[path[0]] * model.emit[path[0]][seq[0]];
        for t in 1..seq.len() {
            p *= model.trans[path[t - 1]][path[t]] * model.emit[path[t]][seq[t]];
        }
        total += p;
        let mut t = seq.len();
        loop {
            if t == 0 {
                return total;
            }
            t -= 1;
            path[t] += 1;
            if path[t] < n {
                break;
            }
            path[t] = 0;
        }
    }
}

#[test]
fn acceptance_forward_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for instance in 0..200 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=5);
        let model = random_model(&mut rng, n, m);
        let len = rng.random_range(1..=6);
        let seq: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();
        let got = forward(&model, &seq).unwrap().log_likelihood.exp();
        let want = path_sum_likelihood(&model, &seq);
        let relative = (got - want).abs() / want;
        assert!(
            relative <= 1e-10,
            "instance {instance}: relative error {relative}"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("acceptance: forward likelihood matches path enumeration (200 instances, {elapsed:?}) ... PASS");
}

#[test]
fn acceptance_viterbi_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for instance in 0..200 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=5);
        let model = random_model(&mut rng, n, m);
        let len = rng.random_range(1..=6);
        let seq: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();

        // Oracle: enumerate all paths with the same score association as
        // the decoder; among exact ties the lowest-index-per-backtrack
        // rule selects the path minimal in last-to-first order.
        let mut best_score = f64::NEG_INFINITY;
        let mut best_paths: Vec<Vec<usize>> = Vec::new();
        let mut path = vec![0usize; len];
        loop {
            let mut score = model.pi[path[0]].ln() + model.emit[path[0]][seq[0]].ln();
            for t in 1..len {
                score += model.trans[path[t - 1]][path[t]].ln();
                score += model.emit[path[t]][seq[t]].ln();
            }
            if score > best_score {
                best_score = score;
                best_paths = vec![path.clone()];
            } else if score == best_score {
                best_paths.push(path.clone());
            }
            let mut t = len;
            let mut done = false;
            loop {
                if t == 0 {
                    done = true;
                    break;
                }
                t -= 1;
                path[t] += 1;
                if path[t] < n {
                    break;
                }
                path[t] = 0;
            }
            if done {
                break;
            }
        }
        let expected = best_paths
            .iter()
            .min_by_key(|p| p.iter().rev().copied().collect::<Vec<_>>())
            .unwrap();

        let got = viterbi(&model, &seq).unwrap();
        assert_eq!(&got.path, expected, "instance {instance}");
    }
    println!("acceptance: viterbi equals brute-force argmax under the tie-break (200 instances) ... PASS");
}

#[test]
fn acceptance_em_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for problem in 0..20 {
        let truth = random_model(&mut rng, 3, 6);
        let data = sample(&truth, 50, &LengthLaw::Fixed(30), rng.random()).unwrap();
        let init = random_model(&mut rng, 3, 6);
        // Negative tolerance disables early stopping: the full budget runs.
        let (_, report) = baum_welch(&init, &data, 50, f64::NEG_INFINITY).unwrap();
        assert_eq!(report.iterations_run, 50, "problem {problem}");
        for (i, pair) in report.log_likelihood_per_iteration.windows(2).enumerate() {
            assert!(
                pair[1] >= pair[0] - 1e-8,
                "problem {problem}: decrease at iteration {i}: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }
    println!(
        "acceptance: EM log-likelihood non-decreasing over 50 iterations (20 problems) ... PASS"
    );
}

fn emission_overlap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

fn worst_row_l1(candidate: &HmmModel, truth: &HmmModel) -> f64 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for rest in permutations(n - 1) {
            for slot in 0..n {
                let mut perm: Vec<usize> =
                    rest.iter().map(|&v| v + usize::from(v >= slot)).collect();
                perm.insert(0, slot);
                out.push(perm);
            }
        }
        out
    }
    let l1 = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum() };
    permutations(truth.n_states)
        .iter()
        .map(|perm| {
            let p = candidate.permute_states(perm).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..truth.n_states {
                worst = worst.max(l1(&p.trans[i], &truth.trans[i]));
                worst = worst.max(l1(&p.emit[i], &truth.emit[i]));
            }
            worst
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn acceptance_model_recovery() {
    let started = Instant::now();
    let truth = HmmModel::new(
        vec![0.5, 0.3, 0.2],
        vec![
            vec![0.8, 0.15, 0.05],
            vec![0.05, 0.8, 0.15],
            vec![0.15, 0.05, 0.8],
        ],
        vec![
            vec![0.65, 0.3, 0.0125, 0.0125, 0.0125, 0.0125],
            vec![0.0125, 0.0125, 0.65, 0.3, 0.0125, 0.0125],
            vec![0.0125, 0.0125, 0.0125, 0.0125, 0.3, 0.65],
        ],
    )
    .unwrap();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let overlap = emission_overlap(&truth.emit[i], &truth.emit[j]);
            assert!(
                overlap < 0.2,
                "emission overlap {overlap} between rows {i} and {j}"
            );
        }
    }

    let mut passed = 0;
    let mut worsts = Vec::new();
    for seed in 0..10u64 {
        let data = sample(&truth, 2000, &LengthLaw::Fixed(20), seed).unwrap();
        let total: usize = data.iter().map(Vec::len).sum();
        // Softened k-means inits; short restarts keep the best basin by
        // likelihood before the long run.
        let options = KMeansOptions {
            smoothing: total as f64 / 500.0,
            ..KMeansOptions::default()
        };
        let mut best: Option<(f64, HmmModel)> = None;
        for restart in 0..3u64 {
            let init =
                kmeans_init_with(&data, 3, seed.wrapping_add(restart * 1000), &options).unwrap();
            let (model, report) = baum_welch(&init, &data, 30, 1e-6).unwrap();
            let ll = *report.log_likelihood_per_iteration.last().unwrap();
            if best.as_ref().is_none_or(|(b, _)| ll > *b) {
                best = Some((ll, model));
            }
        }
        let (_, warm) = best.unwrap();
        let (trained, _) = baum_welch(&warm, &data, 70, 1e-6).unwrap();
        let worst = worst_row_l1(&trained, &truth);
        worsts.push(worst);
        if worst <= 0.05 {
            passed += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(passed >= 9, "only {passed}/10 seeds recovered: {worsts:?}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("acceptance: planted-model recovery {passed}/10 seeds within 0.05 L1 ({elapsed:?}) ... PASS");
}

#[test]
fn acceptance_pruning_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..100 {
        let n = rng.random_range(2..=12);
        let trans: Vec<Vec<f64>> = (0..n).map(|_| random_row(&mut rng, n)).collect();
        let kept = prune_transitions(&trans, 0.15);
        // Oracle scan.
        let mut oracle = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if trans[i][j] >= 0.15 {
                    oracle.push((i, j, trans[i][j]));
                }
            }
        }
        assert_eq!(kept, oracle);
        // Monotone in epsilon.
        let thresholds = [0.0, 0.05, 0.15, 0.3, 0.6];
        for pair in thresholds.windows(2) {
            let looser = prune_transitions(&trans, pair[0]);
            let tighter = prune_transitions(&trans, pair[1]);
            assert!(tighter.iter().all(|e| looser.contains(e)));
        }
    }
    println!("acceptance: pruning keeps exactly the entries >= epsilon and is monotone ... PASS");
}

#[test]
fn acceptance_start_stop_rule() {
    // 12-node digraph where exactly {6, 8, 9, 10} have in-degree 0.
    let mut edges = Vec::new();
    for source in [6usize, 8, 9, 10] {
        edges.push((source, source % 6, 0.5));
    }
    edges.extend([
        (0, 1, 0.3),
        (1, 2, 0.3),
        (2, 3, 0.3),
        (3, 4, 0.3),
        (4, 5, 0.3),
        (5, 0, 0.3),
        (5, 7, 0.2),
        (7, 0, 0.6),
        (5, 11, 0.15),
        (11, 11, 0.85),
    ]);
    let map = build_pseudo_map(&edges, 12, 0.15).unwrap();
    let report = find_start_stop(&map, None, None).unwrap();
    assert_eq!(report.start_candidates, BTreeSet::from([6, 8, 9, 10]));
    println!("acceptance: start candidates are exactly {{6, 8, 9, 10}} on the fixture ... PASS");
}

#[test]
fn acceptance_clique_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for instance in 0..500 {
        let n = rng.random_range(1..=10);
        let p = rng.random::<f64>();
        let mut adjacency = vec![0u16; n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < p {
                    adjacency[u] |= 1 << v;
                    adjacency[v] |= 1 << u;
                    edges.push((u, v));
                }
            }
        }
        let g = UndirectedView::from_edges(n, &edges);
        let got = maximal_cliques(&g);

        // Oracle: every subset that is a clique and cannot be extended.
        let mut expected: Vec<Vec<usize>> = Vec::new();
        for mask in 1u16..(1 << n) {
            let is_clique = |mask: u16| -> bool {
                (0..n).all(|v| mask & (1 << v) == 0 || (mask & !(1 << v)) & !adjacency[v] == 0)
            };
            if !is_clique(mask) {
                continue;
            }
            let extendable = (0..n).any(|u| mask & (1 << u) == 0 && mask & !adjacency[u] == 0);
            if !extendable {
                expected.push((0..n).filter(|&v| mask & (1 << v) != 0).collect());
            }
        }
        expected.sort();
        assert_eq!(got, expected, "instance {instance}, n={n}");
    }
    println!("acceptance: maximal cliques match exhaustive enumeration (500 graphs) ... PASS");
}

/// EQ on an 8-node bitmask graph, for the exhaustive-cover oracle.
fn mask_eq(adjacency: &[u8; 8], cover: &[u8]) -> f64 {
    let degree: Vec<f64> = (0..8).map(|v| adjacency[v].count_ones() as f64).collect();
    let m: f64 = degree.iter().sum::<f64>() / 2.0;
    if m == 0.0 {
        return 0.0;
    }
    let two_m = 2.0 * m;
    let mut memberships = [0u32; 8];
    for &community in cover {
        for v in 0..8 {
            if community & (1 << v) != 0 {
                memberships[v] += 1;
            }
        }
    }
    let mut eq = 0.0;
    for &community in cover {
        for v in 0..8usize {
            if community & (1 << v) == 0 {
                continue;
            }
            for w in 0..8usize {
                if community & (1 << w) == 0 {
                    continue;
                }
                let adjacent = f64::from(adjacency[v] & (1 << w) != 0);
                eq += (adjacent - degree[v] * degree[w] / two_m)
                    / f64::from(memberships[v] * memberships[w]);
            }
        }
    }
    eq / two_m
}

#[test]
fn acceptance_eagle_sanity() {
    // Two K4s joined by the bridge 3-4.
    let mut edges = vec![(3usize, 4usize)];
    for base in [0, 4] {
        for u in base..base + 4 {
            for v in (u + 1)..base + 4 {
                edges.push((u, v));
            }
        }
    }
    let g = UndirectedView::from_edges(8, &edges);
    let cover = eagle_cluster(&g, 3, 2);
    assert_eq!(cover.communities.len(), 2);
    assert_eq!(cover.communities[0], BTreeSet::from([0, 1, 2, 3]));
    assert_eq!(cover.communities[1], BTreeSet::from([4, 5, 6, 7]));

    let mut adjacency = [0u8; 8];
    for &(u, v) in &edges {
        adjacency[u] |= 1 << v;
        adjacency[v] |= 1 << u;
    }

    // Exhaustive-cover search. Disconnected communities are never optimal
    // (splitting one into components removes only negative cross terms),
    // so communities range over the 94 connected subsets; covers of up to
    // 4 of them are enumerated, plus every partition of the 8 nodes.
    let connected: Vec<u8> = (1u16..256)
        .map(|mask| mask as u8)
        .filter(|&mask| {
            let start = mask.trailing_zeros() as u8;
            let mut seen = 1u8 << start;
            loop {
                let mut grown = seen;
                for v in 0..8 {
                    if seen & (1 << v) != 0 {
                        grown |= adjacency[v] & mask;
                    }
                }
                if grown == seen {
                    return seen == mask;
                }
                seen = grown;
            }
        })
        .collect();
    let mut best = 0.0f64; // the empty cover
    let k = connected.len();
    for a in 0..k {
        best = best.max(mask_eq(&adjacency, &[connected[a]]));
        for b in (a + 1)..k {
            best = best.max(mask_eq(&adjacency, &[connected[a], connected[b]]));
            for c in (b + 1)..k {
                let triple = [connected[a], connected[b], connected[c]];
                best = best.max(mask_eq(&adjacency, &triple));
                for d in (c + 1)..k {
                    let quad = [connected[a], connected[b], connected[c], connected[d]];
                    best = best.max(mask_eq(&adjacency, &quad));
                }
            }
        }
    }
    // Partitions of the 8 nodes (blocks may be disconnected).
    fn partitions(node: usize, blocks: &mut Vec<u8>, adjacency: &[u8; 8], best: &mut f64) {
        if node == 8 {
            *best = best.max(mask_eq(adjacency, blocks));
            return;
        }
        for i in 0..blocks.len() {
            blocks[i] |= 1 << node;
            partitions(node + 1, blocks, adjacency, best);
            blocks[i] &= !(1 << node);
        }
        blocks.push(1 << node);
        partitions(node + 1, blocks, adjacency, best);
        blocks.pop();
    }
    partitions(0, &mut Vec::new(), &adjacency, &mut best);

    assert!(
        (cover.eq - best).abs() <= 1e-12,
        "eagle eq {} vs exhaustive optimum {}",
        cover.eq,
        best
    );

    // Two disjoint triangles score exactly one half.
    let triangles =
        UndirectedView::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
    let cover = eagle_cluster(&triangles, 3, 2);
    assert_eq!(cover.communities.len(), 2);
    assert!((cover.eq - 0.5).abs() <= 1e-12, "eq = {}", cover.eq);
    println!("acceptance: EAGLE finds the EQ-optimal cover on the bridge fixture; disjoint triangles give EQ = 0.5 ... PASS");
}

#[test]
fn acceptance_metrics_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..200 {
        let n = rng.random_range(2..=12);
        let p = rng.random::<f64>();
        let mut adjacency = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < p {
                    adjacency[u][v] = true;
                    adjacency[v][u] = true;
                    edges.push((u, v));
                }
            }
        }
        let g = UndirectedView::from_edges(n, &edges);

        // Independent all-pairs BFS over the boolean matrix.
        let bfs = |source: usize| -> Vec<Option<usize>> {
            let mut dist = vec![None; n];
            dist[source] = Some(0);
            let mut frontier = vec![source];
            let mut level = 0;
            while !frontier.is_empty() {
                level += 1;
                let mut next = Vec::new();
                for &u in &frontier {
                    for v in 0..n {
                        if adjacency[u][v] && dist[v].is_none() {
                            dist[v] = Some(level);
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
            dist
        };

        for (v, got) in node_metrics(&g).into_iter().enumerate() {
            let neighbors: Vec<usize> = (0..n).filter(|&w| adjacency[v][w]).collect();
            let deg = neighbors.len();
            let mut triangles = 0usize;
            for i in 0..deg {
                for j in (i + 1)..deg {
                    triangles += usize::from(adjacency[neighbors[i]][neighbors[j]]);
                }
            }
            let expected_cc = if deg < 2 {
                0.0
            } else {
                2.0 * triangles as f64 / (deg * (deg - 1)) as f64
            };
            assert!((got.clustering_coefficient - expected_cc).abs() <= 1e-12);

            let dist = bfs(v);
            let finite: Vec<usize> = (0..n).filter(|&w| w != v).filter_map(|w| dist[w]).collect();
            let sum: usize = finite.iter().sum();
            let expected_cl = if sum == 0 {
                0.0
            } else {
                finite.len() as f64 / sum as f64
            };
            assert!((got.closeness - expected_cl).abs() <= 1e-12);
            assert_eq!(got.eccentricity, finite.iter().copied().max().unwrap_or(0));

            let expected_nc = if deg == 0 {
                0.0
            } else {
                neighbors
                    .iter()
                    .map(|&w| (0..n).filter(|&x| adjacency[w][x]).count())
                    .sum::<usize>() as f64
                    / deg as f64
            };
            assert!((got.neighborhood_connectivity - expected_nc).abs() <= 1e-12);
        }

        let got = network_metrics(&g).unwrap();
        let mut diameter = 0usize;
        let mut pair_sum = 0usize;
        let mut pair_count = 0usize;
        let mut degree_sum = 0usize;
        let mut degree_max = 0usize;
        for v in 0..n {
            let deg = (0..n).filter(|&w| adjacency[v][w]).count();
            degree_sum += deg;
            degree_max = degree_max.max(deg);
            let dist = bfs(v);
            for w in (v + 1)..n {
                if let Some(d) = dist[w] {
                    diameter = diameter.max(d);
                    pair_sum += d;
                    pair_count += 1;
                }
            }
        }
        assert_eq!(got.diameter, diameter);
        assert!((got.density - edges.len() as f64 * 2.0 / (n * (n - 1)) as f64).abs() <= 1e-12);
        let expected_central = if n > 2 {
            (0..n)
                .map(|v| degree_max - (0..n).filter(|&w| adjacency[v][w]).count())
                .sum::<usize>() as f64
                / ((n - 1) * (n - 2)) as f64
        } else {
            0.0
        };
        assert!((got.degree_centralization - expected_central).abs() <= 1e-12);
        let expected_cpl = if pair_count == 0 {
            0.0
        } else {
            pair_sum as f64 / pair_count as f64
        };
        assert!((got.characteristic_path_length - expected_cpl).abs() <= 1e-12);
        let _ = degree_sum;
    }

    // Closed forms.
    let complete = {
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in (u + 1)..6 {
                edges.push((u, v));
            }
        }
        UndirectedView::from_edges(6, &edges)
    };
    let m = network_metrics(&complete).unwrap();
    assert_eq!(m.density, 1.0);
    assert_eq!(m.diameter, 1);
    assert_eq!(m.degree_centralization, 0.0);
    assert_eq!(m.characteristic_path_length, 1.0);
    let star = UndirectedView::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
    let m = network_metrics(&star).unwrap();
    assert_eq!(m.degree_centralization, 1.0);
    assert_eq!(m.diameter, 2);
    println!("acceptance: node and network metrics match the BFS + triangle oracle (200 graphs) ... PASS");
}

/// A 12-state, 39-activity ground truth with a skewed activity profile.
fn full_scale_spec(n_cases: usize, seed: u64) -> GroundTruthSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(987);
    let n = 12;
    let m = 39;
    let mut emit = Vec::with_capacity(n);
    for state in 0..n {
        let mut row = vec![0.0f64; m];
        // Three dominant activities per state plus a long Zipf tail.
        for k in 0..3 {
            row[(state * 3 + k) % m] += match k {
                0 => 0.55,
                1 => 0.25,
                _ => 0.1,
            };
        }
        for (symbol, slot) in row.iter_mut().enumerate() {
            *slot += 0.1 / (1.0 + symbol as f64);
        }
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
        emit.push(row);
    }
    let mut trans = Vec::with_capacity(n);
    for state in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 0.3).collect();
        row[state] += 1.2;
        row[(state + 1) % n] += 0.8;
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
        trans.push(row);
    }
    let model = HmmModel::new(vec![1.0 / n as f64; n], trans, emit).unwrap();
    GroundTruthSpec {
        model: ModelDocument::from_model(&model),
        labels: (0..m).map(|i| format!("Activity {i:02}")).collect(),
        n_cases,
        length_law: LengthLaw::Fixed(8),
        seed,
    }
}

fn run_pipeline(input: &std::path::Path, outdir: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mapminer"))
        .args([
            "pipeline",
            "--input",
            input.to_str().unwrap(),
            "--states",
            "12",
            "--epsilon",
            "0.15",
            "--iterations",
            "50",
            "--clique",
            "3",
            "--complex",
            "2",
            "--outdir",
            outdir.to_str().unwrap(),
        ])
        .output()
        .expect("pipeline binary runs")
}

#[test]
fn acceptance_end_to_end_full_scale() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let spec = full_scale_spec(12_500, 31);
    let log = generate_log(&spec).unwrap();
    assert!(log.n_events() >= 100_000, "only {} events", log.n_events());
    assert_eq!(log.n_activities(), 39);
    let input = dir.path().join("synth.csv");
    let mut buffer = Vec::new();
    write_log(&log, &mut buffer).unwrap();
    fs::write(&input, &buffer).unwrap();

    let outdir = dir.path().join("out");
    let output = run_pipeline(&input, &outdir);
    assert!(
        output.status.success(),
        "pipeline failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );

    // Every artifact exists and parses under its schema.
    let model: ModelDocument =
        serde_json::from_str(&fs::read_to_string(outdir.join("model.json")).unwrap()).unwrap();
    assert_eq!(model.n_states, 12);
    assert_eq!(model.n_symbols, 39);
    for row in &model.emit {
        let sum: f64 = row.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9, "emission row sums to {sum}");
    }
    model.clone().into_model().unwrap();

    let strategies: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("strategies.json")).unwrap()).unwrap();
    assert_eq!(strategies["strategies"].as_array().unwrap().len(), 12);

    for artifact in [
        "pseudo_map.json",
        "cover.json",
        "intention_map.json",
        "metrics.json",
        "manifest.json",
    ] {
        let value: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(outdir.join(artifact)).unwrap()).unwrap();
        assert!(value.is_object(), "{artifact} is not an object");
    }
    let dot = fs::read_to_string(outdir.join("pseudo_map.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    let graphml = fs::read_to_string(outdir.join("pseudo_map.graphml")).unwrap();
    assert!(graphml.contains("<graphml"));

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "acceptance: full-scale pipeline ({} events) completed in {elapsed:?} with valid artifacts ... PASS",
        log.n_events()
    );
}

#[test]
fn acceptance_pipeline_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = full_scale_spec(600, 8);
    let log = generate_log(&spec).unwrap();
    let input = dir.path().join("synth.csv");
    let mut buffer = Vec::new();
    write_log(&log, &mut buffer).unwrap();
    fs::write(&input, &buffer).unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert!(run_pipeline(&input, &out_a).status.success());
    assert!(run_pipeline(&input, &out_b).status.success());

    for artifact in [
        "model.json",
        "strategies.json",
        "pseudo_map.dot",
        "pseudo_map.graphml",
        "pseudo_map.json",
        "cover.json",
        "intention_map.json",
        "metrics.json",
        "manifest.json",
    ] {
        let a = fs::read(out_a.join(artifact)).unwrap();
        let b = fs::read(out_b.join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between identical runs");
    }
    println!("acceptance: repeated runs produce byte-identical artifacts ... PASS");
}
