use cvrank::lda::{gibbs_conditional, train, GibbsCounts, LdaConfig};
use cvrank::Vocabulary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Conditional of token (d, n) computed straight from the token list,
/// skipping the token itself.
fn brute_force_conditional(
    corpus: &[Vec<usize>],
    z: &[Vec<usize>],
    d: usize,
    n: usize,
    (topics, vocab): (usize, usize),
    (alpha, eta): (f64, f64),
) -> Vec<f64> {
    let w = corpus[d][n];
    let mut weights = Vec::with_capacity(topics);
    for k in 0..topics {
        let (mut n_dk, mut n_kw, mut n_k) = (0.0, 0.0, 0.0);
        for (dd, doc) in corpus.iter().enumerate() {
            for (nn, &ww) in doc.iter().enumerate() {
                if (dd, nn) == (d, n) || z[dd][nn] != k {
                    continue;
                }
                n_k += 1.0;
                if dd == d {
                    n_dk += 1.0;
                }
                if ww == w {
                    n_kw += 1.0;
                }
            }
        }
        weights.push((n_dk + alpha) * (n_kw + eta) / (n_k + vocab as f64 * eta));
    }
    let total: f64 = weights.iter().sum();
    weights.iter().map(|x| x / total).collect()
}

#[test]
fn conditional_matches_brute_force_on_random_states() {
    let (docs, vocab, topics) = (2, 3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..200 {
        let corpus: Vec<Vec<usize>> = (0..docs)
            .map(|_| (0..rng.gen_range(1..6)).map(|_| rng.gen_range(0..vocab)).collect())
            .collect();
        let z: Vec<Vec<usize>> = corpus
            .iter()
            .map(|doc| doc.iter().map(|_| rng.gen_range(0..topics)).collect())
            .collect();
        let alpha = rng.gen_range(0.01..5.0);
        let eta = rng.gen_range(0.001..2.0);
        let d = rng.gen_range(0..docs);
        let n = rng.gen_range(0..corpus[d].len());

        let mut rest_corpus = corpus.clone();
        let mut rest_z = z.clone();
        rest_corpus[d].remove(n);
        rest_z[d].remove(n);
        let counts = GibbsCounts::from_assignments(&rest_corpus, &rest_z, topics, vocab);
        let got: Vec<f64> = gibbs_conditional(&counts, d, corpus[d][n], alpha, eta);
        let want = brute_force_conditional(&corpus, &z, d, n, (topics, vocab), (alpha, eta));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
        }
        checked += 1;
    }
    assert!(checked >= 100);
}

#[test]
fn conditional_from_explicit_counts() {
    // n_dk = [2, 0], n_kw = [1, 3], n_k = [4, 6], V = 3, alpha = 1, eta = 1:
    // weights 3·2/7 and 1·4/9.
    let counts = GibbsCounts::from_parts(vec![vec![2, 0]], vec![vec![1, 0, 3], vec![3, 3, 0]], vec![4, 6]).unwrap();
    let p: Vec<f64> = gibbs_conditional(&counts, 0, 0, 1.0, 1.0);
    let (a, b) = (6.0 / 7.0, 4.0 / 9.0);
    assert!((p[0] - a / (a + b)).abs() < 1e-15);
    assert!((p[1] - b / (a + b)).abs() < 1e-15);
}

/// `a (a + 1) ... (a + n - 1)`.
fn rising(a: f64, n: u32) -> f64 {
    (0..n).map(|i| a + i as f64).product()
}

/// Collapsed joint p(z | w) up to a constant, for every assignment of a tiny
/// corpus, by enumeration.
fn exact_posterior(
    corpus: &[Vec<usize>],
    topics: usize,
    vocab: usize,
    alpha: f64,
    eta: f64,
) -> Vec<(Vec<Vec<usize>>, f64)> {
    let tokens: usize = corpus.iter().map(Vec::len).sum();
    let mut states = Vec::new();
    for code in 0..topics.pow(tokens as u32) {
        let mut c = code;
        let z: Vec<Vec<usize>> = corpus
            .iter()
            .map(|doc| {
                doc.iter()
                    .map(|_| {
                        let k = c % topics;
                        c /= topics;
                        k
                    })
                    .collect()
            })
            .collect();
        let mut ndk = vec![vec![0u32; topics]; corpus.len()];
        let mut nkw = vec![vec![0u32; vocab]; topics];
        for (d, doc) in corpus.iter().enumerate() {
            for (n, &w) in doc.iter().enumerate() {
                ndk[d][z[d][n]] += 1;
                nkw[z[d][n]][w] += 1;
            }
        }
        let mut weight = 1.0;
        for row in &ndk {
            weight *= row.iter().map(|&c| rising(alpha, c)).product::<f64>();
        }
        for row in &nkw {
            weight *= row.iter().map(|&c| rising(eta, c)).product::<f64>();
            weight /= rising(vocab as f64 * eta, row.iter().sum());
        }
        states.push((z, weight));
    }
    let total: f64 = states.iter().map(|s| s.1).sum();
    states.into_iter().map(|(z, w)| (z, w / total)).collect()
}

fn separated(z: &[Vec<usize>]) -> bool {
    let a = z[0][0];
    z[0].iter().all(|&k| k == a) && z[1].iter().all(|&k| k != a) && z[1].windows(2).all(|p| p[0] == p[1])
}

fn first_doc_pure(z: &[Vec<usize>]) -> bool {
    z[0].windows(2).all(|p| p[0] == p[1])
}

#[test]
fn final_sampler_state_follows_the_exact_posterior() {
    let corpus = vec![vec![0, 0, 0], vec![1, 1, 1]];
    let vocabulary = Vocabulary::from_terms(["a", "b"]);
    let (alpha, eta) = (0.5, 0.1);
    let posterior = exact_posterior(&corpus, 2, 2, alpha, eta);
    let p_sep: f64 = posterior.iter().filter(|(z, _)| separated(z)).map(|s| s.1).sum();
    let p_pure: f64 = posterior.iter().filter(|(z, _)| first_doc_pure(z)).map(|s| s.1).sum();

    let runs = 600;
    let (mut sep, mut pure) = (0, 0);
    for seed in 0..runs {
        let config = LdaConfig::<f64>::new(2).alpha(alpha).eta(eta).iterations(30).seed(seed);
        let model = train(&corpus, &vocabulary, &config).unwrap();
        let z = &model.state.as_ref().unwrap().assignments;
        sep += separated(z) as usize;
        pure += first_doc_pure(z) as usize;
    }
    for (hits, p) in [(sep, p_sep), (pure, p_pure)] {
        let freq = hits as f64 / runs as f64;
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!(
            (freq - p).abs() <= 4.0 * sigma,
            "empirical {freq} vs exact {p} (sigma {sigma})"
        );
    }
}
