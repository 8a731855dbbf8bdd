//! Maximally stable extremal regions.
//!
//! Dark regions are connected components (4-connectivity) of the level sets
//! `{v <= t}`; bright regions are the same on the negated image. For a
//! component `C` at threshold `t` the variation is
//! `(|C(t + delta)| - |C|) / |C|`, where `C(t + delta)` is the component
//! containing `C` at threshold `min(t + delta, 255)`. `C` is maximally stable
//! when its variation is strictly below that of its largest sub-component at
//! `t - 1` and no larger than that of its containing component at `t + 1`, so
//! ties favor the smaller region.
//!
//! The component tree is built with union-find over pixels sorted by intensity.

use serde::{Deserialize, Serialize};

use super::InterestRegion;
use crate::imgcore::GrayImage;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MserParams {
    pub delta: u8,
    pub min_area: usize,
    /// Largest region as a fraction of the image area.
    pub max_area_fraction: f64,
}

impl Default for MserParams {
    fn default() -> Self {
        Self {
            delta: 5,
            min_area: 30,
            max_area_fraction: 0.01,
        }
    }
}

impl MserParams {
    pub fn max_area(&self, width: usize, height: usize) -> usize {
        (self.max_area_fraction * (width * height) as f64).floor() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Darker than the surroundings.
    Dark,
    Bright,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MserRegion {
    pub polarity: Polarity,
    /// Threshold (in the polarity's intensity frame) at which the region is stable.
    pub level: u8,
    pub variation: f64,
    /// Sorted row-major pixel indices.
    pub pixels: Vec<u32>,
}

impl MserRegion {
    /// Ellipse with the second moments of the member pixels, each pixel treated
    /// as a unit square.
    pub fn ellipse(&self, width: usize) -> InterestRegion {
        let n = self.pixels.len() as f64;
        let (mut sx, mut sy) = (0.0, 0.0);
        for &p in &self.pixels {
            sx += (p as usize % width) as f64;
            sy += (p as usize / width) as f64;
        }
        let (mx, my) = (sx / n, sy / n);
        let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
        for &p in &self.pixels {
            let dx = (p as usize % width) as f64 - mx;
            let dy = (p as usize / width) as f64 - my;
            cxx += dx * dx;
            cxy += dx * dy;
            cyy += dy * dy;
        }
        let (cxx, cxy, cyy) = (cxx / n + 1.0 / 12.0, cxy / n, cyy / n + 1.0 / 12.0);
        // a uniform ellipse x' S^-1 x <= 4 has covariance S
        let det = cxx * cyy - cxy * cxy;
        InterestRegion {
            x: mx,
            y: my,
            a: cyy / det / 4.0,
            b: -cxy / det / 4.0,
            c: cxx / det / 4.0,
            strength: -self.variation,
        }
    }
}

const NONE: u32 = u32::MAX;

struct Node {
    level: u8,
    area: u32,
    min_pixel: u32,
    parent: u32,
    children: Vec<u32>,
    /// Pixels that joined at this node's level.
    own_pixels: Vec<u32>,
}

struct ComponentTree {
    nodes: Vec<Node>,
}

impl ComponentTree {
    fn build(values: &[u8], width: usize, height: usize) -> Self {
        let n = values.len();
        let mut buckets = [0usize; 257];
        for &v in values {
            buckets[v as usize + 1] += 1;
        }
        for i in 1..257 {
            buckets[i] += buckets[i - 1];
        }
        let mut order = vec![0u32; n];
        let mut next = buckets;
        for (i, &v) in values.iter().enumerate() {
            order[next[v as usize]] = i as u32;
            next[v as usize] += 1;
        }

        let mut uf: Vec<u32> = vec![NONE; n];
        let mut size = vec![0u32; n];
        let mut area = vec![0u32; n];
        let mut min_pixel = vec![0u32; n];
        let mut node_of = vec![NONE; n];
        let mut pending_children: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut pending_pixels: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut nodes: Vec<Node> = Vec::new();

        fn find(uf: &mut [u32], mut p: u32) -> u32 {
            let mut root = p;
            while uf[root as usize] != root {
                root = uf[root as usize];
            }
            while uf[p as usize] != root {
                let next = uf[p as usize];
                uf[p as usize] = root;
                p = next;
            }
            root
        }

        for t in 0..=255u8 {
            let level = &order[buckets[t as usize]..buckets[t as usize + 1]];
            if level.is_empty() {
                continue;
            }
            for &p in level {
                let pi = p as usize;
                uf[pi] = p;
                size[pi] = 1;
                area[pi] = 1;
                min_pixel[pi] = p;
                node_of[pi] = NONE;
                pending_pixels[pi].push(p);

                let (x, y) = (pi % width, pi / width);
                let mut neighbors = [NONE; 4];
                if x > 0 {
                    neighbors[0] = p - 1;
                }
                if x + 1 < width {
                    neighbors[1] = p + 1;
                }
                if y > 0 {
                    neighbors[2] = p - width as u32;
                }
                if y + 1 < height {
                    neighbors[3] = p + width as u32;
                }
                for q in neighbors {
                    if q == NONE || uf[q as usize] == NONE {
                        continue;
                    }
                    let ra = find(&mut uf, p);
                    let rb = find(&mut uf, q);
                    if ra == rb {
                        continue;
                    }
                    // a component from an earlier level becomes a child
                    for r in [ra, rb] {
                        let node = node_of[r as usize];
                        if node != NONE {
                            pending_children[r as usize].push(node);
                            node_of[r as usize] = NONE;
                        }
                    }
                    let (big, small) = if size[ra as usize] >= size[rb as usize] {
                        (ra, rb)
                    } else {
                        (rb, ra)
                    };
                    let (bi, si) = (big as usize, small as usize);
                    uf[si] = big;
                    size[bi] += size[si];
                    area[bi] += area[si];
                    min_pixel[bi] = min_pixel[bi].min(min_pixel[si]);
                    let moved = std::mem::take(&mut pending_children[si]);
                    pending_children[bi].extend(moved);
                    let moved = std::mem::take(&mut pending_pixels[si]);
                    pending_pixels[bi].extend(moved);
                }
            }
            for &p in level {
                let r = find(&mut uf, p) as usize;
                if node_of[r] != NONE {
                    continue;
                }
                let id = nodes.len() as u32;
                let children = std::mem::take(&mut pending_children[r]);
                for &c in &children {
                    nodes[c as usize].parent = id;
                }
                nodes.push(Node {
                    level: t,
                    area: area[r],
                    min_pixel: min_pixel[r],
                    parent: NONE,
                    children,
                    own_pixels: std::mem::take(&mut pending_pixels[r]),
                });
                node_of[r] = id;
            }
        }
        Self { nodes }
    }

    /// Area of the component containing `node` at threshold `t >= level(node)`.
    fn area_at(&self, mut node: u32, t: u8) -> u32 {
        loop {
            let parent = self.nodes[node as usize].parent;
            if parent == NONE || self.nodes[parent as usize].level > t {
                return self.nodes[node as usize].area;
            }
            node = parent;
        }
    }

    /// Variation of `node`'s component evaluated at threshold `t`.
    fn variation(&self, node: u32, t: u8, delta: u8) -> f64 {
        let own = self.area_at(node, t);
        let grown = self.area_at(node, t.saturating_add(delta));
        f64::from(grown - own) / f64::from(own)
    }

    fn pixels(&self, node: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            out.extend_from_slice(&node.own_pixels);
            stack.extend_from_slice(&node.children);
        }
        out.sort_unstable();
        out
    }

    fn stable_nodes(&self, params: &MserParams, max_area: usize) -> Vec<(u32, f64)> {
        let delta = params.delta;
        let mut out = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let id = id as u32;
            let area = node.area as usize;
            if area < params.min_area || area > max_area {
                continue;
            }
            let var = self.variation(id, node.level, delta);
            let child_var = node
                .children
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    let (na, nb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
                    na.area.cmp(&nb.area).then(nb.min_pixel.cmp(&na.min_pixel))
                })
                .map_or(f64::INFINITY, |c| self.variation(c, node.level - 1, delta));
            if var >= child_var {
                continue;
            }
            if node.level < 255
                && node.parent != NONE
                && self.nodes[node.parent as usize].level == node.level + 1
            {
                let parent_var = self.variation(node.parent, node.level + 1, delta);
                if var > parent_var {
                    continue;
                }
            }
            out.push((id, var));
        }
        out
    }
}

/// Stable regions of both polarities with their pixel sets, ordered by
/// polarity, level and smallest member pixel.
pub fn mser_regions(img: &GrayImage, params: &MserParams) -> Vec<MserRegion> {
    let max_area = params.max_area(img.width(), img.height());
    let mut out = Vec::new();
    for polarity in [Polarity::Dark, Polarity::Bright] {
        let values: Vec<u8> = match polarity {
            Polarity::Dark => img.data().to_vec(),
            Polarity::Bright => img.data().iter().map(|&v| 255 - v).collect(),
        };
        let tree = ComponentTree::build(&values, img.width(), img.height());
        for (id, variation) in tree.stable_nodes(params, max_area) {
            out.push(MserRegion {
                polarity,
                level: tree.nodes[id as usize].level,
                variation,
                pixels: tree.pixels(id),
            });
        }
    }
    out.sort_by(|a, b| (a.polarity, a.level, a.pixels[0]).cmp(&(b.polarity, b.level, b.pixels[0])));
    out
}

pub fn mser(img: &GrayImage, params: &MserParams) -> Vec<InterestRegion> {
    mser_regions(img, params)
        .iter()
        .map(|r| r.ellipse(img.width()))
        .collect()
}
