//! Message events, order book snapshots and the 10-event block segmentation.

mod block;
mod parse;
mod types;

pub use block::{derive_bar, mid_price, segment_blocks, Block, OhlcBar, BLOCK_LEN};
pub use parse::{
    book_header, parse_book_record, parse_book_text, parse_message_record, parse_message_text,
    MESSAGE_HEADER,
};
pub use types::{EventKind, Level, LobSnapshot, MessageEvent, Side, DEFAULT_DEPTH};
