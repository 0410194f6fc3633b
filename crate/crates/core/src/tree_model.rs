//! Starlike trees, linear trees and their explicit rooted realizations.

use std::fmt;

use crate::error::Error;

const MAX_PATH: u32 = 1_000_000;

/// A bundle of paths hung from one back node. The empty bundle is `[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Starlike {
    paths: Vec<u32>,
}

impl Starlike {
    /// Builds a star from path lengths (vertex counts); zeros are rejected.
    pub fn new(mut paths: Vec<u32>) -> Result<Starlike, Error> {
        if let Some(pos) = paths.iter().position(|&q| q == 0) {
            return Err(Error::Syntax {
                pos,
                msg: "path lengths must be positive".into(),
            });
        }
        paths.sort_unstable();
        Ok(Starlike { paths })
    }

    pub fn empty() -> Starlike {
        Starlike { paths: Vec::new() }
    }

    /// `r` leaves.
    pub fn leaves(r: u32) -> Starlike {
        Starlike {
            paths: vec![1; r as usize],
        }
    }

    pub fn paths(&self) -> &[u32] {
        &self.paths
    }

    pub fn width(&self) -> usize {
        self.paths.len()
    }

    pub fn height(&self) -> u32 {
        self.paths.last().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Number of vertices in the attached paths (the back node excluded).
    pub fn size(&self) -> usize {
        self.paths.iter().map(|&q| q as usize).sum()
    }
}

impl fmt::Display for Starlike {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.paths.is_empty() {
            return f.write_str("[0]");
        }
        f.write_str("[")?;
        for (i, q) in self.paths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("]")
    }
}

/// `G = [T_1, ..., T_k]`: star `T_j` hangs from back node `v_j` of the main path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearTree {
    stars: Vec<Starlike>,
}

impl LinearTree {
    pub fn new(stars: Vec<Starlike>) -> Result<LinearTree, Error> {
        if stars.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(LinearTree { stars })
    }

    pub fn stars(&self) -> &[Starlike] {
        &self.stars
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex_count(&self) -> usize {
        self.stars.len() + self.stars.iter().map(Starlike::size).sum::<usize>()
    }

    pub fn max_width(&self) -> usize {
        self.stars.iter().map(Starlike::width).max().unwrap_or(0)
    }

    pub fn max_height(&self) -> u32 {
        self.stars.iter().map(Starlike::height).max().unwrap_or(0)
    }

    /// Degree of back node `v_j` (0-based `j`).
    pub fn back_degree(&self, j: usize) -> usize {
        let k = self.stars.len();
        let main = usize::from(j > 0) + usize::from(j + 1 < k);
        main + self.stars[j].width()
    }

    /// Maximum vertex degree.
    pub fn max_degree(&self) -> usize {
        let back = (0..self.len())
            .map(|j| self.back_degree(j))
            .max()
            .unwrap_or(0);
        let inner = if self.stars.iter().any(|s| s.paths.iter().any(|&q| q >= 2)) {
            2
        } else {
            1
        };
        if self.vertex_count() == 1 {
            0
        } else {
            back.max(inner)
        }
    }

    /// Appends a star.
    pub fn push(&mut self, star: Starlike) {
        self.stars.push(star);
    }

    /// Copy with the last star replaced.
    pub fn with_last(&self, star: Starlike) -> LinearTree {
        let mut stars = self.stars.clone();
        *stars.last_mut().expect("nonempty") = star;
        LinearTree { stars }
    }
}

impl fmt::Display for LinearTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.stars.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

impl std::str::FromStr for LinearTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_linear_tree(s)
    }
}

impl std::str::FromStr for Starlike {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut p = Lexer {
            s: s.as_bytes(),
            i: 0,
        };
        let star = p.star()?;
        p.ws();
        if p.i != s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(star)
    }
}

/// Parses `[[1,1,1],[1],[0],[1,1]]`. Whitespace is allowed between tokens.
pub fn parse_linear_tree(text: &str) -> Result<LinearTree, Error> {
    let mut p = Lexer {
        s: text.as_bytes(),
        i: 0,
    };
    let stars = p.star_list()?;
    p.ws();
    if p.i != text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    LinearTree::new(stars)
}

/// Parses a list of stars, with or without the outer brackets:
/// `[[1],[1,2]]` or `[1],[1,2]`.
pub fn parse_star_list(text: &str) -> Result<Vec<Starlike>, Error> {
    let mut p = Lexer {
        s: text.as_bytes(),
        i: 0,
    };
    let stars = p.any_star_list()?;
    p.ws();
    if p.i != text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(stars)
}

pub(crate) struct Lexer<'a> {
    pub(crate) s: &'a [u8],
    pub(crate) i: usize,
}

impl Lexer<'_> {
    pub(crate) fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.i,
            msg: msg.to_string(),
        }
    }

    pub(crate) fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    pub(crate) fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn uint(&mut self) -> Result<(usize, u32), Error> {
        self.ws();
        let start = self.i;
        let mut v: u64 = 0;
        while let Some(&c) = self.s.get(self.i) {
            if !c.is_ascii_digit() {
                break;
            }
            v = v * 10 + u64::from(c - b'0');
            if v > u64::from(MAX_PATH) {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "integer exceeds 10^6".into(),
                });
            }
            self.i += 1;
        }
        if self.i == start {
            return Err(self.err("expected an integer"));
        }
        Ok((start, v as u32))
    }

    pub(crate) fn star(&mut self) -> Result<Starlike, Error> {
        self.expect(b'[')?;
        let mut items = vec![self.uint()?];
        while self.eat(b',') {
            items.push(self.uint()?);
        }
        self.expect(b']')?;
        if items.len() == 1 && items[0].1 == 0 {
            return Ok(Starlike::empty());
        }
        if let Some(&(pos, _)) = items.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Syntax {
                pos,
                msg: "0 may only appear alone as [0]".into(),
            });
        }
        let mut paths: Vec<u32> = items.into_iter().map(|(_, v)| v).collect();
        paths.sort_unstable();
        Ok(Starlike { paths })
    }

    /// Bracketed list if it starts with `[[`, otherwise bare stars.
    pub(crate) fn any_star_list(&mut self) -> Result<Vec<Starlike>, Error> {
        self.ws();
        let rest = &self.s[self.i..];
        let nested = rest.first() == Some(&b'[')
            && rest[1..].iter().find(|c| !c.is_ascii_whitespace()) == Some(&b'[');
        if nested {
            return self.star_list();
        }
        let mut stars = vec![self.star()?];
        while self.peek_is(b',') {
            self.eat(b',');
            stars.push(self.star()?);
        }
        Ok(stars)
    }

    pub(crate) fn peek_is(&mut self, c: u8) -> bool {
        self.ws();
        self.s.get(self.i) == Some(&c)
    }

    pub(crate) fn star_list(&mut self) -> Result<Vec<Starlike>, Error> {
        self.expect(b'[')?;
        let mut stars = vec![self.star()?];
        while self.eat(b',') {
            stars.push(self.star()?);
        }
        self.expect(b']')?;
        Ok(stars)
    }
}

/// Caterpillar `[r_1, ..., r_k]`: star `j` carries `r_j` leaves.
pub fn from_caterpillar(r: &[u32]) -> Result<LinearTree, Error> {
    LinearTree::new(r.iter().map(|&x| Starlike::leaves(x)).collect())
}

/// Caterpillar counts, if every attached path is a single leaf.
pub fn to_caterpillar(g: &LinearTree) -> Option<Vec<u32>> {
    g.stars
        .iter()
        .map(|s| s.paths.iter().all(|&q| q == 1).then_some(s.width() as u32))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Adjacency,
    Laplacian,
    /// Same spectrum as `Laplacian` on trees (bipartite graphs).
    SignlessLaplacian,
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "adjacency" | "a" => Ok(MatrixKind::Adjacency),
            "laplacian" | "l" => Ok(MatrixKind::Laplacian),
            "signless" | "signless-laplacian" | "q" => Ok(MatrixKind::SignlessLaplacian),
            _ => Err(Error::Syntax {
                pos: 0,
                msg: format!("unknown matrix kind '{s}'"),
            }),
        }
    }
}

/// Tree with vertices `0..n` in elimination order: every parent index is
/// larger than its children's, and the root is the last vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    diag: Vec<i64>,
    offdiag_sign: i64,
    kind: MatrixKind,
}

impl RootedTree {
    /// `parent[i] > i` for all non-root vertices; only the last vertex is a root.
    pub fn from_parents(parent: Vec<Option<usize>>, kind: MatrixKind) -> Result<RootedTree, Error> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        for (i, p) in parent.iter().enumerate() {
            match p {
                Some(p) if *p <= i || *p >= n => {
                    return Err(Error::Domain(format!("vertex {i} has invalid parent {p}")))
                }
                None if i + 1 != n => {
                    return Err(Error::Domain(format!("vertex {i} is a second root")))
                }
                Some(_) if i + 1 == n => {
                    return Err(Error::Domain("last vertex must be the root".into()))
                }
                _ => {}
            }
        }
        let mut children = vec![Vec::new(); n];
        let mut degree = vec![0i64; n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(i);
                degree[i] += 1;
                degree[p] += 1;
            }
        }
        let (diag, offdiag_sign) = match kind {
            MatrixKind::Adjacency => (vec![0; n], 1),
            MatrixKind::Laplacian => (degree, -1),
            MatrixKind::SignlessLaplacian => (degree, 1),
        };
        Ok(RootedTree {
            parent,
            children,
            diag,
            offdiag_sign,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Diagonal matrix entry `a_vv`.
    pub fn diag(&self, v: usize) -> i64 {
        self.diag[v]
    }

    /// Common value of the off-diagonal entries on tree edges.
    pub fn offdiag(&self) -> i64 {
        self.offdiag_sign
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `max over edges of d(u) + d(v)`.
    pub fn max_edge_degree_sum(&self) -> usize {
        (0..self.len())
            .filter_map(|v| self.parent[v].map(|p| self.degree(v) + self.degree(p)))
            .max()
            .unwrap_or(0)
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn root(&self) -> usize {
        self.len() - 1
    }
}

/// Explicit tree with per-vertex diagonal entries. Star `j`'s paths are laid
/// out leaf first, then `v_j`; `v_k` is the root.
pub fn realize(g: &LinearTree, kind: MatrixKind) -> RootedTree {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let k = g.len();
    // back node ids are known only after their star is laid out
    let mut next = 0usize;
    let mut pending_back: Option<usize> = None;
    for (j, star) in g.stars.iter().enumerate() {
        let mut tails = Vec::with_capacity(star.width());
        for &q in &star.paths {
            for step in 0..q as usize {
                let v = next;
                next += 1;
                if step + 1 < q as usize {
                    parent[v] = Some(v + 1);
                }
            }
            tails.push(next - 1);
        }
        let back = next;
        next += 1;
        for t in tails {
            parent[t] = Some(back);
        }
        if let Some(prev) = pending_back {
            parent[prev] = Some(back);
        }
        pending_back = if j + 1 < k { Some(back) } else { None };
    }
    RootedTree::from_parents(parent, kind).expect("linear tree layout is a valid elimination order")
}

/// Index of each back node `v_j` in [`realize`]'s layout.
pub fn back_node_ids(g: &LinearTree) -> Vec<usize> {
    let mut ids = Vec::with_capacity(g.len());
    let mut next = 0;
    for s in &g.stars {
        next += s.size();
        ids.push(next);
        next += 1;
    }
    ids
}

/// Greedy dominance matching: can every path in `small` be mapped to a
/// distinct path in `big` at least as long?
fn dominated(small: &[u32], big: &[u32]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut b: Vec<u32> = big.to_vec();
    b.sort_unstable_by(|x, y| y.cmp(x));
    let mut s: Vec<u32> = small.to_vec();
    s.sort_unstable_by(|x, y| y.cmp(x));
    s.iter().zip(&b).all(|(x, y)| x <= y)
}

/// Sufficient subgraph test for consecutive members of a sequence: `g`
/// embeds into `h` with main paths aligned at `v_1`.
///
/// Stars before the last one must embed into the matching star of `h`.
/// `g`'s last star may also use the continuation of `h`'s main path, which
/// offers a path of `1 + h(h_{l+1})` vertices from `v_l`.
pub fn is_subtree_step(g: &LinearTree, h: &LinearTree) -> Result<bool, Error> {
    let l = g.len();
    if h.len() != l + 1 {
        return Err(Error::LengthMismatch {
            expected: l + 1,
            got: h.len(),
        });
    }
    for j in 0..l - 1 {
        if !dominated(&g.stars[j].paths, &h.stars[j].paths) {
            return Ok(false);
        }
    }
    let mut room = h.stars[l - 1].paths.clone();
    room.push(1 + h.stars[l].height());
    Ok(dominated(&g.stars[l - 1].paths, &room))
}
