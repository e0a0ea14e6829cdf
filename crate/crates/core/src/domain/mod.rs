//! Campaigns, the rating rubric, and their numeric encoding.

mod campaign;
mod encode;
mod rating;
mod rubric;

pub use campaign::{CampaignRecord, Category, ControlVector, Dataset, Platform};
pub use encode::{
    encode_controls, encode_factors, encode_response, encode_row, factor_prevalence_filter,
    funded_percent, ln_amount, percent_of_goal, DesignRow, PrevalenceSplit, CATEGORY_DUMMY,
    CONTROL_TERMS, DEFAULT_PREVALENCE_THRESHOLD, PLATFORM_DUMMY,
};
pub use rating::{QuestionId, Rating, QUESTION_COUNT};
pub use rubric::{MainCategory, Rubric, RubricQuestion, Subcategory, RUBRIC_SCHEMA_VERSION};
