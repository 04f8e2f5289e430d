pub mod opcore;
pub mod par;
pub mod qnum;
pub mod qsymb;
pub mod reps;
pub mod cli;
pub mod dynamics;
pub mod sample;
pub mod verify;
