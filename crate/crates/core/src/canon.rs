//! Canonical labelling of small directed acyclic graphs (Hasse diagrams) by
//! colour refinement plus individualisation. The search tree is explored in
//! full, so the result is exact; the graphs handled here have few
//! automorphisms and the tree stays small.

/// Canonical encoding of the cover digraph given by `upper`.
pub fn canonical_key(upper: &[Vec<usize>]) -> Vec<u8> {
    let n = upper.len();
    let mut lower = vec![Vec::new(); n];
    for (x, ups) in upper.iter().enumerate() {
        for &y in ups {
            lower[y].push(x);
        }
    }
    let graph = Graph { upper, lower: &lower };

    let initial: Vec<u32> = vec![0; n];
    let colors = graph.refine(initial);
    let mut best: Option<Vec<u32>> = None;
    graph.search(colors, &mut best);
    let code = best.unwrap_or_default();

    let mut key = Vec::with_capacity(4 * (code.len() + 1));
    key.extend_from_slice(&(n as u32).to_be_bytes());
    for c in code {
        key.extend_from_slice(&c.to_be_bytes());
    }
    key
}

struct Graph<'a> {
    upper: &'a [Vec<usize>],
    lower: &'a [Vec<usize>],
}

impl Graph<'_> {
    /// Iterated refinement until the number of colour classes is stable.
    /// Colours are re-ranked by sorted signatures, so the result depends
    /// only on the isomorphism type of (graph, colouring).
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = colors.len();
        let mut classes = count_classes(&colors);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..n)
                .map(|v| {
                    let mut up: Vec<u32> = self.upper[v].iter().map(|&u| colors[u]).collect();
                    let mut down: Vec<u32> = self.lower[v].iter().map(|&u| colors[u]).collect();
                    up.sort_unstable();
                    down.sort_unstable();
                    (colors[v], up, down)
                })
                .collect();
            let mut distinct: Vec<&(u32, Vec<u32>, Vec<u32>)> = sigs.iter().collect();
            distinct.sort();
            distinct.dedup();
            colors = sigs
                .iter()
                .map(|s| distinct.binary_search(&s).expect("signature present") as u32)
                .collect();
            let now = distinct.len();
            if now == classes {
                return colors;
            }
            classes = now;
        }
    }

    fn search(&self, colors: Vec<u32>, best: &mut Option<Vec<u32>>) {
        let n = colors.len();
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1);
        let Some(target) = target else {
            let code = self.encode(&colors);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        };
        for v in (0..n).filter(|&v| colors[v] as usize == target) {
            let individualized: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| if u == v { 2 * c } else { 2 * c + 1 })
                .collect();
            let refined = self.refine(rank(&individualized));
            self.search(refined, best);
        }
    }

    fn encode(&self, labels: &[u32]) -> Vec<u32> {
        let n = labels.len() as u32;
        let mut edges: Vec<u32> = self
            .upper
            .iter()
            .enumerate()
            .flat_map(|(x, ups)| ups.iter().map(move |&y| labels[x] * n + labels[y]))
            .collect();
        edges.sort_unstable();
        edges
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn rank(colors: &[u32]) -> Vec<u32> {
    let mut distinct = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    colors
        .iter()
        .map(|c| distinct.binary_search(c).expect("present") as u32)
        .collect()
}
