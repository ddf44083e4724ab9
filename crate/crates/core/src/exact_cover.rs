//! Dancing-links exact cover search (Algorithm X), choosing the column with
//! the fewest remaining rows at every step.

use std::ops::ControlFlow;

const ROOT: usize = 0;

pub struct ExactCover {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    columns: usize,
}

impl ExactCover {
    /// `rows[r]` lists the columns covered by row `r`; every column is primary.
    pub fn new(columns: usize, rows: &[Vec<usize>]) -> Self {
        let headers = columns + 1;
        let mut m = ExactCover {
            left: (0..headers).map(|i| if i == 0 { columns } else { i - 1 }).collect(),
            right: (0..headers).map(|i| if i == columns { 0 } else { i + 1 }).collect(),
            up: (0..headers).collect(),
            down: (0..headers).collect(),
            col: (0..headers).collect(),
            row: vec![usize::MAX; headers],
            size: vec![0; headers],
            columns,
        };
        for (r, cols) in rows.iter().enumerate() {
            let mut first: Option<usize> = None;
            for &c in cols {
                assert!(c < columns, "column {c} out of range");
                let h = c + 1;
                let node = m.left.len();
                m.col.push(h);
                m.row.push(r);
                m.up.push(m.up[h]);
                m.down.push(h);
                let above = m.up[h];
                m.down[above] = node;
                m.up[h] = node;
                m.size[h] += 1;
                match first {
                    None => {
                        m.left.push(node);
                        m.right.push(node);
                        first = Some(node);
                    }
                    Some(f) => {
                        let last = m.left[f];
                        m.left.push(last);
                        m.right.push(f);
                        m.right[last] = node;
                        m.left[f] = node;
                    }
                }
            }
        }
        m
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.size[self.col[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Visit every exact cover as a list of row indices. The visitor may stop early.
    pub fn solve<F>(&mut self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let mut partial = Vec::new();
        self.search(&mut partial, &mut visit)
    }

    fn search<F>(&mut self, partial: &mut Vec<usize>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if self.right[ROOT] == ROOT {
            return visit(partial);
        }
        let mut best = self.right[ROOT];
        let mut c = self.right[best];
        while c != ROOT {
            if self.size[c] < self.size[best] {
                best = c;
            }
            c = self.right[c];
        }
        if self.size[best] == 0 {
            return ControlFlow::Continue(());
        }
        self.cover(best);
        let mut r = self.down[best];
        let mut flow = ControlFlow::Continue(());
        while r != best {
            partial.push(self.row[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.col[j]);
                j = self.right[j];
            }
            flow = self.search(partial, visit);
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.col[j]);
                j = self.left[j];
            }
            partial.pop();
            if flow.is_break() {
                break;
            }
            r = self.down[r];
        }
        self.uncover(best);
        flow
    }

    pub fn count(&mut self) -> usize {
        let mut n = 0;
        let _ = self.solve(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example_has_one_cover() {
        let rows = vec![
            vec![2, 4, 5],
            vec![0, 3, 6],
            vec![1, 2, 5],
            vec![0, 3],
            vec![1, 6],
            vec![3, 4, 6],
        ];
        let mut m = ExactCover::new(7, &rows);
        let mut found = Vec::new();
        let _ = m.solve(|s| {
            let mut s = s.to_vec();
            s.sort_unstable();
            found.push(s);
            ControlFlow::Continue(())
        });
        assert_eq!(found, vec![vec![0, 3, 4]]);
    }

    #[test]
    fn counts_perfect_matchings_of_k6() {
        // 6 points, rows are all pairs: 5 * 3 * 1 = 15 covers
        let rows: Vec<Vec<usize>> = (0..6)
            .flat_map(|a| (a + 1..6).map(move |b| vec![a, b]))
            .collect();
        assert_eq!(ExactCover::new(6, &rows).count(), 15);
    }

    #[test]
    fn uncovered_column_means_no_solution() {
        assert_eq!(ExactCover::new(3, &[vec![0, 1]]).count(), 0);
    }

    #[test]
    fn early_stop() {
        let rows: Vec<Vec<usize>> = (0..4).flat_map(|a| (a + 1..4).map(move |b| vec![a, b])).collect();
        let mut m = ExactCover::new(4, &rows);
        let mut seen = 0;
        let flow = m.solve(|_| {
            seen += 1;
            ControlFlow::Break(())
        });
        assert!(flow.is_break());
        assert_eq!(seen, 1);
        assert_eq!(m.count(), 3);
    }
}
