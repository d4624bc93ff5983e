/// Counts elementary design steps, for empirical complexity checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter(pub u64);

impl OpCounter {
    pub fn tick(&mut self) {
        self.0 += 1;
    }

    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }

    pub fn get(self) -> u64 {
        self.0
    }
}
