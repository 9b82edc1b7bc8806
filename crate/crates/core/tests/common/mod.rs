//! Seeded generators shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use boxwire::semiring::{Lang, LinkLabel, Word};
use boxwire::structure::{to_mat, Link, LinkMap, MatArrow, PortId, WiringArrow};
use boxwire::BoxShape;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Gen {
    pub rng: ChaCha8Rng,
    ports: usize,
    labels: usize,
    boxes: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ports: 0,
            labels: 0,
            boxes: 0,
        }
    }

    fn fresh_ports(&mut self, n: usize) -> BTreeSet<PortId> {
        (0..n)
            .map(|_| {
                self.ports += 1;
                PortId::new(format!("p{}", self.ports)).unwrap()
            })
            .collect()
    }

    fn fresh_label(&mut self) -> Word {
        self.labels += 1;
        Word::atom(LinkLabel::new(format!("l{}", self.labels)).unwrap())
    }

    /// A box with fresh ports, up to three on each side.
    pub fn boxed(&mut self) -> BoxShape {
        self.boxes += 1;
        let (i, o) = (self.rng.random_range(0..=3), self.rng.random_range(0..=3));
        let ins = self.fresh_ports(i);
        let outs = self.fresh_ports(o);
        BoxShape::new(format!("B{}", self.boxes), ins, outs).unwrap()
    }

    /// A valid arrow `b → a` with fresh labels. Every legal target gets
    /// between zero and two links; `units` allows identity-style links.
    pub fn wiring(&mut self, b: &BoxShape, a: &BoxShape, units: bool) -> WiringArrow {
        let in_sources: Vec<PortId> = b.out_ports().iter().chain(a.in_ports()).cloned().collect();
        let out_sources: Vec<PortId> = b.out_ports().iter().cloned().collect();
        let links = |targets: &BTreeSet<PortId>, sources: &[PortId], g: &mut Gen| -> LinkMap {
            let mut m = LinkMap::new();
            for t in targets {
                for _ in 0..g.rng.random_range(0..=2) {
                    let Some(s) = sources.choose(&mut g.rng).cloned() else {
                        break;
                    };
                    let link = if units && g.rng.random_bool(0.1) {
                        Link::unit(t.clone(), s)
                    } else {
                        Link::new(t.clone(), s)
                    };
                    m.insert(g.fresh_label(), link);
                }
            }
            m
        };
        let theta_in = links(b.in_ports(), &in_sources, self);
        let theta_out = links(a.out_ports(), &out_sources, self);
        WiringArrow::new(b.clone(), a.clone(), theta_in, theta_out).unwrap()
    }

    pub fn arrow(&mut self, b: &BoxShape, a: &BoxShape) -> MatArrow {
        to_mat(&self.wiring(b, a, true))
    }

    /// `k + 1` boxes, each either fresh or (sometimes) a repeat of the
    /// previous one, so that endo-arrows `X → X` turn up.
    pub fn boxes(&mut self, k: usize) -> Vec<BoxShape> {
        let mut out = vec![self.boxed()];
        for _ in 0..k {
            let next = if self.rng.random_bool(0.2) {
                out.last().unwrap().clone()
            } else {
                self.boxed()
            };
            out.push(next);
        }
        out
    }

    /// A chain of `k` composable arrows, innermost first.
    pub fn chain(&mut self, k: usize) -> Vec<MatArrow> {
        let bs = self.boxes(k);
        bs.windows(2).map(|w| self.arrow(&w[0], &w[1])).collect()
    }

    pub fn word(&mut self) -> Word {
        let n = self.rng.random_range(0..=3);
        Word::from_labels((0..n).map(|_| {
            let k = self.rng.random_range(1..=4);
            LinkLabel::new(format!("w{k}")).unwrap()
        }))
    }

    pub fn lang(&mut self) -> Lang {
        let n = self.rng.random_range(0..=4);
        Lang::from_words((0..n).map(|_| self.word()).collect::<Vec<_>>())
    }
}
