//! Connected components of the part of a surface inside a region.

use std::collections::{HashMap, HashSet};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::geom::mesh::edge_key;
use crate::geom::surface::Surface;
use crate::vector::AmbientVector;

/// Lattice subdivision used for triangles cut by the region boundary.
pub const DEFAULT_LATTICE: usize = 4;

type Bary = [f64; 3];
/// A lattice edge as its two sorted lattice coordinates.
type LatticeEdge = ((usize, usize), (usize, usize));

/// A whole triangle (`corners == None`) or one lattice sub-triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub triangle: usize,
    pub corners: Option<[Bary; 3]>,
}

/// Component labels of the pieces lying in the region.
#[derive(Clone, Debug)]
pub struct ComponentLabels {
    pub pieces: Vec<Piece>,
    pub labels: Vec<usize>,
    pub count: usize,
    /// Per component: whether it touches a truncation edge of the mesh.
    pub reaches_truncation: Vec<bool>,
}

impl ComponentLabels {
    /// Pieces grouped by component label.
    pub fn groups(&self) -> Vec<Vec<&Piece>> {
        let mut out = vec![Vec::new(); self.count];
        for (p, &l) in self.pieces.iter().zip(&self.labels) {
            out[l].push(p);
        }
        out
    }
}

enum Class {
    Whole,
    Skip,
    Cut,
}

fn lattice_point(l: usize, i: usize, j: usize) -> Bary {
    let n = l as f64;
    [(l - i - j) as f64 / n, i as f64 / n, j as f64 / n]
}

/// Sub-triangles of the `l x l` lattice: upward ones first, then downward.
fn lattice_triangles(l: usize) -> Vec<[(usize, usize); 3]> {
    let mut out = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l - i {
            out.push([(i, j), (i + 1, j), (i, j + 1)]);
        }
    }
    for i in 0..l {
        for j in 0..l - i {
            if i + j + 2 <= l {
                out.push([(i + 1, j), (i + 1, j + 1), (i, j + 1)]);
            }
        }
    }
    out
}

/// Lattice sub-triangle on segment `m` of local edge `k`, with the
/// segment's endpoints.
fn edge_owner(l: usize, k: usize, m: usize) -> ((usize, usize), (usize, usize), (usize, usize)) {
    match k {
        0 => ((m, 0), (m, 0), (m + 1, 0)),
        1 => ((l - m - 1, m), (l - m, m), (l - m - 1, m + 1)),
        _ => ((0, l - m - 1), (0, l - m), (0, l - m - 1)),
    }
}

/// Labels the connected components of `{x in surface : inside(x)}`.
///
/// Triangles entirely inside are single pieces; triangles cut by the
/// region boundary are split into an `lattice x lattice` grid whose
/// sub-triangles connect through shared edges lying inside.
pub fn label_components<F>(surface: &Surface<'_>, inside: &F, lattice: usize) -> ComponentLabels
where
    F: Fn(&AmbientVector) -> bool + Sync,
{
    let mesh = surface.mesh;
    let l = lattice.max(1);
    let probes: [Bary; 7] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ];
    let classes: Vec<Class> = (0..mesh.triangles().len())
        .into_par_iter()
        .map(|t| {
            let hits = probes.iter().filter(|b| inside(&surface.position(t, **b))).count();
            match hits {
                7 => Class::Whole,
                0 => Class::Skip,
                _ => Class::Cut,
            }
        })
        .collect();

    let subs = lattice_triangles(l);
    let sub_index: HashMap<(usize, usize, bool), usize> = subs
        .iter()
        .enumerate()
        .map(|(s, tri)| {
            let up = tri[1] == (tri[0].0 + 1, tri[0].1) && tri[2] == (tri[0].0, tri[0].1 + 1);
            let key = if up { (tri[0].0, tri[0].1, true) } else { (tri[2].0, tri[2].1, false) };
            (key, s)
        })
        .collect();

    // per cut triangle: inside flags of lattice points and sub-triangles
    struct CutData {
        sub_in: Vec<bool>,
        mid_in: HashMap<LatticeEdge, bool>,
    }
    let cut: Vec<Option<CutData>> = classes
        .par_iter()
        .enumerate()
        .map(|(t, c)| {
            if !matches!(c, Class::Cut) {
                return None;
            }
            let mut point_in = HashMap::new();
            for i in 0..=l {
                for j in 0..=l - i {
                    point_in.insert((i, j), inside(&surface.position(t, lattice_point(l, i, j))));
                }
            }
            let mut mid_in = HashMap::new();
            let mut sub_in = Vec::with_capacity(subs.len());
            for tri in &subs {
                let c: Vec<Bary> = tri.iter().map(|&(i, j)| lattice_point(l, i, j)).collect();
                let centroid = [
                    (c[0][0] + c[1][0] + c[2][0]) / 3.0,
                    (c[0][1] + c[1][1] + c[2][1]) / 3.0,
                    (c[0][2] + c[1][2] + c[2][2]) / 3.0,
                ];
                let any = tri.iter().any(|p| point_in[p]) || inside(&surface.position(t, centroid));
                sub_in.push(any);
                for e in 0..3 {
                    let (p, q) = (tri[e], tri[(e + 1) % 3]);
                    let key = if p < q { (p, q) } else { (q, p) };
                    mid_in.entry(key).or_insert_with(|| {
                        point_in[&p] || point_in[&q] || {
                            let (bp, bq) = (lattice_point(l, p.0, p.1), lattice_point(l, q.0, q.1));
                            let m = [0.5 * (bp[0] + bq[0]), 0.5 * (bp[1] + bq[1]), 0.5 * (bp[2] + bq[2])];
                            inside(&surface.position(t, m))
                        }
                    });
                }
            }
            Some(CutData { sub_in, mid_in })
        })
        .collect();

    // node allocation
    let mut pieces = Vec::new();
    let mut whole_node = vec![usize::MAX; classes.len()];
    let mut sub_node: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, c) in classes.iter().enumerate() {
        match c {
            Class::Whole => {
                whole_node[t] = pieces.len();
                pieces.push(Piece { triangle: t, corners: None });
            }
            Class::Cut => {
                let data = cut[t].as_ref().unwrap();
                for (s, tri) in subs.iter().enumerate() {
                    if data.sub_in[s] {
                        sub_node.insert((t, s), pieces.len());
                        let corners = [
                            lattice_point(l, tri[0].0, tri[0].1),
                            lattice_point(l, tri[1].0, tri[1].1),
                            lattice_point(l, tri[2].0, tri[2].1),
                        ];
                        pieces.push(Piece { triangle: t, corners: Some(corners) });
                    }
                }
            }
            Class::Skip => {}
        }
    }
    let mut uf = UnionFind::<usize>::new(pieces.len());

    // unions inside cut triangles across interior lattice edges
    for (t, data) in cut.iter().enumerate() {
        let Some(data) = data else { continue };
        let mut edge_subs: HashMap<LatticeEdge, Vec<usize>> = HashMap::new();
        for (s, tri) in subs.iter().enumerate() {
            if !data.sub_in[s] {
                continue;
            }
            for e in 0..3 {
                let (p, q) = (tri[e], tri[(e + 1) % 3]);
                let key = if p < q { (p, q) } else { (q, p) };
                if data.mid_in[&key] {
                    edge_subs.entry(key).or_default().push(sub_node[&(t, s)]);
                }
            }
        }
        let mut keys: Vec<_> = edge_subs.keys().copied().collect();
        keys.sort_unstable();
        for k in keys {
            let v = &edge_subs[&k];
            for w in v.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }

    // unions across mesh edges, per lattice segment
    let truncation: HashSet<[usize; 2]> = mesh
        .boundary_edges()
        .iter()
        .filter(|e| mesh.is_truncation_edge(e))
        .map(|e| edge_key(e[0], e[1]))
        .collect();
    let mut touching = vec![false; pieces.len()];
    let mut segments: HashMap<([usize; 2], usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = edge_key(a, b);
            let is_trunc = truncation.contains(&key);
            for m in 0..l {
                let global = if a < b { m } else { l - 1 - m };
                let node = match classes[t] {
                    Class::Whole => Some(whole_node[t]),
                    Class::Skip => None,
                    Class::Cut => {
                        let data = cut[t].as_ref().unwrap();
                        let (owner, p, q) = edge_owner(l, k, m);
                        let s = sub_index[&(owner.0, owner.1, true)];
                        let seg_key = if p < q { (p, q) } else { (q, p) };
                        if data.sub_in[s] && data.mid_in[&seg_key] {
                            Some(sub_node[&(t, s)])
                        } else {
                            None
                        }
                    }
                };
                if let Some(n) = node {
                    if is_trunc {
                        touching[n] = true;
                    }
                    segments.entry((key, global)).or_default().push(n);
                }
            }
        }
    }
    let mut keys: Vec<_> = segments.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let v = &segments[&k];
        for w in v.windows(2) {
            uf.union(w[0], w[1]);
        }
    }

    // compact labels in order of first appearance
    let mut relabel: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(pieces.len());
    for n in 0..pieces.len() {
        let root = uf.find(n);
        let next = relabel.len();
        labels.push(*relabel.entry(root).or_insert(next));
    }
    let count = relabel.len();
    let mut reaches_truncation = vec![false; count];
    for (n, &lab) in labels.iter().enumerate() {
        reaches_truncation[lab] |= touching[n];
    }
    ComponentLabels { pieces, labels, count, reaches_truncation }
}
