pub mod cal;
pub mod classify;
pub mod lda;
pub mod report_cmd;
pub mod risk;
pub mod simulate;
pub mod synth;
