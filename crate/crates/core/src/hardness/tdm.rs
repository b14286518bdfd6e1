use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Most triples an element may occur in.
pub const MAX_OCCURRENCES: usize = 3;

/// A bounded 3-dimensional matching instance. Triples hold indices into
/// `a`, `b` and `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeDMInstance {
    a: Vec<String>,
    b: Vec<String>,
    c: Vec<String>,
    triples: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    q: usize,
    triples: Vec<[String; 3]>,
}

impl ThreeDMInstance {
    pub fn new(
        a: Vec<String>,
        b: Vec<String>,
        c: Vec<String>,
        triples: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let q = a.len();
        if q == 0 || b.len() != q || c.len() != q {
            return Err(Error::Domain(format!(
                "element sets must share one positive size, got {}, {}, {}",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        let mut names = BTreeSet::new();
        for name in a.iter().chain(&b).chain(&c) {
            if !names.insert(name.as_str()) {
                return Err(Error::Domain(format!("element {name} is listed twice")));
            }
        }
        let mut counts = [vec![0usize; q], vec![0usize; q], vec![0usize; q]];
        for (t, triple) in triples.iter().enumerate() {
            for (k, &e) in triple.iter().enumerate() {
                if e >= q {
                    return Err(Error::Domain(format!("triple {t}: index {e} out of range")));
                }
                counts[k][e] += 1;
            }
        }
        for (k, sets) in [&a, &b, &c].iter().enumerate() {
            for (e, name) in sets.iter().enumerate() {
                let n = counts[k][e];
                if !(1..=MAX_OCCURRENCES).contains(&n) {
                    return Err(Error::Domain(format!(
                        "element {name} occurs in {n} triples, expected 1 to {MAX_OCCURRENCES}"
                    )));
                }
            }
        }
        Ok(ThreeDMInstance { a, b, c, triples })
    }

    /// Builds the element sets from the triples, in order of first
    /// appearance.
    pub fn from_named_triples(q: usize, triples: &[[String; 3]]) -> Result<Self> {
        let mut sets: [Vec<String>; 3] = Default::default();
        let mut index: [BTreeMap<String, usize>; 3] = Default::default();
        let mut out = Vec::with_capacity(triples.len());
        for triple in triples {
            let mut t = [0; 3];
            for k in 0..3 {
                let name = &triple[k];
                let next = sets[k].len();
                t[k] = *index[k].entry(name.clone()).or_insert_with(|| {
                    sets[k].push(name.clone());
                    next
                });
            }
            out.push(t);
        }
        let [a, b, c] = sets;
        if a.len() != q || b.len() != q || c.len() != q {
            return Err(Error::Domain(format!(
                "q = {q} but the triples use {}, {} and {} distinct elements",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        ThreeDMInstance::new(a, b, c, out)
    }

    pub fn q(&self) -> usize {
        self.a.len()
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// Elements as `A`, then `B`, then `C`; position `k` is element `k`.
    pub fn elements(&self) -> Vec<&str> {
        self.a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .map(String::as_str)
            .collect()
    }

    /// The three elements of a triple, as positions in [`Self::elements`].
    pub fn triple_elements(&self, t: usize) -> [usize; 3] {
        let [x, y, z] = self.triples[t];
        let q = self.q();
        [x, q + y, 2 * q + z]
    }

    pub fn triple_names(&self, t: usize) -> [&str; 3] {
        let [x, y, z] = self.triples[t];
        [&self.a[x], &self.b[y], &self.c[z]]
    }

    /// True when the chosen triples are pairwise element-disjoint.
    pub fn is_matching(&self, chosen: &[usize]) -> bool {
        let mut used = BTreeSet::new();
        chosen.iter().all(|&t| {
            t < self.triples.len() && self.triple_elements(t).iter().all(|e| used.insert(*e))
        })
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            q: self.q(),
            triples: (0..self.triples.len())
                .map(|t| self.triple_names(t).map(str::to_string))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

pub fn parse_tdm(text: &str) -> Result<ThreeDMInstance> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))?;
    ThreeDMInstance::from_named_triples(doc.q, &doc.triples)
        .map_err(|e| Error::parse("$.triples", e.to_string()))
}

/// A maximum matching, by exhaustive search over the triples.
pub fn maximum_matching(tdm: &ThreeDMInstance) -> Vec<usize> {
    fn go(
        tdm: &ThreeDMInstance,
        t: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if cur.len() + (tdm.triples.len() - t) <= best.len() || best.len() == tdm.q() {
            return;
        }
        if t == tdm.triples.len() {
            *best = cur.clone();
            return;
        }
        let es = tdm.triple_elements(t);
        if es.iter().all(|&e| !used[e]) {
            es.iter().for_each(|&e| used[e] = true);
            cur.push(t);
            go(tdm, t + 1, used, cur, best);
            cur.pop();
            es.iter().for_each(|&e| used[e] = false);
        }
        go(tdm, t + 1, used, cur, best);
    }
    let mut best = Vec::new();
    go(
        tdm,
        0,
        &mut vec![false; 3 * tdm.q()],
        &mut Vec::new(),
        &mut best,
    );
    best
}

/// Elements `a1..aq`, `b1..bq`, `c1..cq`, a hidden perfect matching, and up
/// to `distractors` further distinct triples that keep every element within
/// the occurrence bound. Triples come out shuffled, and elements are
/// numbered in order of first appearance, as [`parse_tdm`] would.
pub fn planted_instance(q: usize, distractors: usize, seed: u64) -> Result<ThreeDMInstance> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pb: Vec<usize> = (0..q).collect();
    let mut pc: Vec<usize> = (0..q).collect();
    pb.shuffle(&mut rng);
    pc.shuffle(&mut rng);
    let mut triples: Vec<[usize; 3]> = (0..q).map(|i| [i, pb[i], pc[i]]).collect();
    let mut counts = [vec![1usize; q], vec![1usize; q], vec![1usize; q]];
    let mut seen: BTreeSet<[usize; 3]> = triples.iter().copied().collect();
    let mut added = 0;
    for _ in 0..distractors * 20 {
        if added == distractors {
            break;
        }
        let t = [
            rng.gen_range(0..q),
            rng.gen_range(0..q),
            rng.gen_range(0..q),
        ];
        if seen.contains(&t) || (0..3).any(|k| counts[k][t[k]] >= MAX_OCCURRENCES) {
            continue;
        }
        (0..3).for_each(|k| counts[k][t[k]] += 1);
        seen.insert(t);
        triples.push(t);
        added += 1;
    }
    triples.shuffle(&mut rng);
    let named: Vec<[String; 3]> = triples
        .iter()
        .map(|&[x, y, z]| {
            [
                format!("a{}", x + 1),
                format!("b{}", y + 1),
                format!("c{}", z + 1),
            ]
        })
        .collect();
    ThreeDMInstance::from_named_triples(q, &named)
}
