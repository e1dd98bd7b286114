//! Cursor machine shared by the Snowball language programs.
//!
//! The word lives in a `Vec<char>` so every position is a code point index.
//! `cursor` moves inside `[limit_backward, limit]`; `bra..ket` delimits the
//! slice that `slice_from`/`slice_del` rewrite.

/// One entry of a suffix (or prefix) table.
///
/// `result` is what the lookup yields when the entry wins. An optional
/// condition gates the entry; when it fails, the next shorter matching
/// entry is tried.
pub(crate) struct Among {
    pub s: &'static str,
    pub result: i32,
    pub cond: Option<fn(&mut Env) -> bool>,
}

pub(crate) const fn among(s: &'static str, result: i32) -> Among {
    Among { s, result, cond: None }
}

#[cfg(test)]
pub(crate) const fn among_if(s: &'static str, result: i32, cond: fn(&mut Env) -> bool) -> Among {
    Among {
        s,
        result,
        cond: Some(cond),
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Env {
    pub current: Vec<char>,
    pub cursor: usize,
    pub limit: usize,
    pub limit_backward: usize,
    pub bra: usize,
    pub ket: usize,
    /// Region markers used by every language (R1, R2, RV ...).
    pub p1: usize,
    pub p2: usize,
    pub pv: usize,
    pub flag: bool,
}

impl Env {
    pub fn new(word: &str) -> Self {
        let current: Vec<char> = word.chars().collect();
        let limit = current.len();
        Env {
            current,
            cursor: 0,
            limit,
            limit_backward: 0,
            bra: 0,
            ket: limit,
            p1: limit,
            p2: limit,
            pv: limit,
            flag: false,
        }
    }

    pub fn into_string(self) -> String {
        self.current.into_iter().collect()
    }

    #[inline]
    pub fn at_limit(&self) -> bool {
        self.cursor >= self.limit
    }

    #[inline]
    pub fn at_limit_backward(&self) -> bool {
        self.cursor <= self.limit_backward
    }

    /// Distance from the cursor to the forward limit; backward-mode code
    /// saves positions this way because edits shift absolute offsets.
    #[inline]
    pub fn from_end(&self) -> usize {
        self.limit - self.cursor
    }

    #[inline]
    pub fn restore_from_end(&mut self, v: usize) {
        self.cursor = self.limit - v;
    }

    /// Advance one character; false at the limit.
    #[inline]
    pub fn next(&mut self) -> bool {
        if self.cursor >= self.limit {
            return false;
        }
        self.cursor += 1;
        true
    }

    #[inline]
    pub fn prev(&mut self) -> bool {
        if self.cursor <= self.limit_backward {
            return false;
        }
        self.cursor -= 1;
        true
    }

    /// Move `n` characters forward if possible (`hop`).
    pub fn hop(&mut self, n: usize) -> bool {
        if self.cursor + n > self.limit {
            return false;
        }
        self.cursor += n;
        true
    }

    pub fn hop_back(&mut self, n: usize) -> bool {
        if self.cursor < self.limit_backward + n {
            return false;
        }
        self.cursor -= n;
        true
    }

    pub fn in_grouping(&mut self, g: &str) -> bool {
        if self.cursor >= self.limit || !g.contains(self.current[self.cursor]) {
            return false;
        }
        self.cursor += 1;
        true
    }

    pub fn in_grouping_b(&mut self, g: &str) -> bool {
        if self.cursor <= self.limit_backward || !g.contains(self.current[self.cursor - 1]) {
            return false;
        }
        self.cursor -= 1;
        true
    }

    pub fn out_grouping(&mut self, g: &str) -> bool {
        if self.cursor >= self.limit || g.contains(self.current[self.cursor]) {
            return false;
        }
        self.cursor += 1;
        true
    }

    pub fn out_grouping_b(&mut self, g: &str) -> bool {
        if self.cursor <= self.limit_backward || g.contains(self.current[self.cursor - 1]) {
            return false;
        }
        self.cursor -= 1;
        true
    }

    /// Skip characters in `g`; stops on the first one outside it.
    /// False if the limit is reached first.
    pub fn go_in_grouping(&mut self, g: &str) -> bool {
        while self.cursor < self.limit {
            if !g.contains(self.current[self.cursor]) {
                return true;
            }
            self.cursor += 1;
        }
        false
    }

    pub fn go_out_grouping(&mut self, g: &str) -> bool {
        while self.cursor < self.limit {
            if g.contains(self.current[self.cursor]) {
                return true;
            }
            self.cursor += 1;
        }
        false
    }

    pub fn go_out_grouping_b(&mut self, g: &str) -> bool {
        while self.cursor > self.limit_backward {
            if g.contains(self.current[self.cursor - 1]) {
                return true;
            }
            self.cursor -= 1;
        }
        false
    }

    fn matches_at(&self, start: usize, s: &str) -> Option<usize> {
        let mut i = start;
        for ch in s.chars() {
            if i >= self.limit || self.current[i] != ch {
                return None;
            }
            i += 1;
        }
        Some(i)
    }

    fn matches_before(&self, end: usize, s: &str) -> Option<usize> {
        let mut i = end;
        for ch in s.chars().rev() {
            if i <= self.limit_backward || self.current[i - 1] != ch {
                return None;
            }
            i -= 1;
        }
        Some(i)
    }

    pub fn eq_s(&mut self, s: &str) -> bool {
        match self.matches_at(self.cursor, s) {
            Some(end) => {
                self.cursor = end;
                true
            }
            None => false,
        }
    }

    pub fn eq_s_b(&mut self, s: &str) -> bool {
        match self.matches_before(self.cursor, s) {
            Some(start) => {
                self.cursor = start;
                true
            }
            None => false,
        }
    }

    /// Longest entry matching forward from the cursor whose condition holds.
    /// Returns its result (0 when nothing matches) and leaves the cursor
    /// after the match.
    pub fn find_among(&mut self, table: &[Among]) -> i32 {
        let c = self.cursor;
        let mut best: Vec<(usize, &Among)> = table
            .iter()
            .filter_map(|a| self.matches_at(c, a.s).map(|end| (end, a)))
            .collect();
        best.sort_by(|x, y| y.0.cmp(&x.0));
        for (end, a) in best {
            self.cursor = end;
            match a.cond {
                None => return a.result,
                Some(f) => {
                    if f(self) {
                        self.cursor = end;
                        return a.result;
                    }
                }
            }
        }
        self.cursor = c;
        0
    }

    /// Backward counterpart of [`Env::find_among`].
    pub fn find_among_b(&mut self, table: &[Among]) -> i32 {
        let c = self.cursor;
        let mut best: Vec<(usize, &Among)> = table
            .iter()
            .filter_map(|a| self.matches_before(c, a.s).map(|start| (start, a)))
            .collect();
        best.sort_by(|x, y| x.0.cmp(&y.0));
        for (start, a) in best {
            self.cursor = start;
            match a.cond {
                None => return a.result,
                Some(f) => {
                    if f(self) {
                        self.cursor = start;
                        return a.result;
                    }
                }
            }
        }
        self.cursor = c;
        0
    }

    fn replace(&mut self, from: usize, to: usize, s: &str) -> isize {
        let repl: Vec<char> = s.chars().collect();
        let adjustment = repl.len() as isize - (to - from) as isize;
        self.current.splice(from..to, repl);
        self.limit = (self.limit as isize + adjustment) as usize;
        if self.cursor >= to {
            self.cursor = (self.cursor as isize + adjustment) as usize;
        } else if self.cursor > from {
            self.cursor = from;
        }
        adjustment
    }

    pub fn slice_from(&mut self, s: &str) {
        let (bra, ket) = (self.bra, self.ket);
        self.replace(bra, ket, s);
        self.ket = bra + s.chars().count();
    }

    pub fn slice_del(&mut self) {
        self.slice_from("");
    }

    /// Matches the literal character at the cursor and advances.
    pub fn eq_c(&mut self, ch: char) -> bool {
        if self.cursor >= self.limit || self.current[self.cursor] != ch {
            return false;
        }
        self.cursor += 1;
        true
    }

    pub fn eq_c_b(&mut self, ch: char) -> bool {
        if self.cursor <= self.limit_backward || self.current[self.cursor - 1] != ch {
            return false;
        }
        self.cursor -= 1;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_replacement_moves_limit() {
        let mut env = Env::new("running");
        env.limit_backward = 0;
        env.cursor = env.limit;
        env.ket = env.cursor;
        assert!(env.eq_s_b("ing"));
        env.bra = env.cursor;
        env.slice_del();
        assert_eq!(env.limit, 4);
        assert_eq!(env.clone().into_string(), "runn");
    }

    #[test]
    fn among_prefers_longest_passing_entry() {
        fn never(_: &mut Env) -> bool {
            false
        }
        const TABLE: &[Among] = &[among("s", 1), among_if("ies", 2, never), among("es", 3)];
        let mut env = Env::new("ponies");
        env.cursor = env.limit;
        assert_eq!(env.find_among_b(TABLE), 3);
        assert_eq!(env.cursor, 4);
    }
}
