use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

#[derive(Debug)]
pub struct Report {
    header: String,
    lines: Vec<(Verdict, String, String)>,
}

impl Report {
    pub fn new(header: String) -> Self {
        Self {
            header,
            lines: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        let v = if ok { Verdict::Pass } else { Verdict::Fail };
        self.lines.push((v, name.to_string(), detail.into()));
    }

    pub fn info(&mut self, name: &str, detail: impl Into<String>) {
        self.lines.push((Verdict::Info, name.to_string(), detail.into()));
    }

    pub fn has_failure(&self) -> bool {
        self.lines.iter().any(|l| l.0 == Verdict::Fail)
    }

    pub fn checks(&self) -> impl Iterator<Item = &(Verdict, String, String)> {
        self.lines.iter()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# fracopt report\n");
        out.push_str(&self.header);
        out.push('\n');
        let (mut pass, mut fail) = (0, 0);
        for (v, name, detail) in &self.lines {
            let tag = match v {
                Verdict::Pass => {
                    pass += 1;
                    "PASS"
                }
                Verdict::Fail => {
                    fail += 1;
                    "FAIL"
                }
                Verdict::Info => "INFO",
            };
            let _ = writeln!(out, "{tag} {name}: {detail}");
        }
        let _ = writeln!(out, "\nsummary: {pass} passed, {fail} failed");
        out
    }
}
