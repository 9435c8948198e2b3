//! Inputs for the pipeline benchmarks.

use menzerath_core::SAMPLE_VERTICAL;

const PARAGRAPH: &str = "Євгеній Рафалович приїхав до міста вранці. \
Він стояв на тротуарі всміхнений, спотілий, з капелюхом, зсуненим на потилицю. \
«Чи ви той новий адвокат?» Так спитав його незнайомий пан. \
Він прочитав т. зв. закон і відклав папери, бо вже було пізно. \
Хто там? — спитав сторож. Ні, це був не сон.\n";

/// Raw text of roughly `sentences` sentences (eight per paragraph).
pub fn raw_corpus(sentences: usize) -> String {
    PARAGRAPH.repeat(sentences.div_ceil(8))
}

/// Vertical-format text made of `copies` copies of the tagged sample.
pub fn tagged_corpus(copies: usize) -> String {
    let block = format!("{}\n", SAMPLE_VERTICAL.trim_end());
    block.repeat(copies)
}
