"""Frame ingestion, background modelling and foreground masks."""
from .background import (
    BackgroundModel,
    BatchResult,
    ForegroundMask,
    extract_foreground,
    model_background,
    process_sequence,
    stitch_masks,
)
from .frames import (
    FrameSequence,
    devectorize,
    frame_names,
    list_frame_files,
    matricize,
    rasters,
    read_frame_dir,
    split_batches,
    write_frame_dir,
)
from .pnm import decode_pnm, encode_pgm, quantize, read_mask, read_pnm, write_mask, write_pgm

__all__ = [
    'BackgroundModel',
    'BatchResult',
    'ForegroundMask',
    'FrameSequence',
    'decode_pnm',
    'devectorize',
    'encode_pgm',
    'extract_foreground',
    'frame_names',
    'list_frame_files',
    'matricize',
    'model_background',
    'process_sequence',
    'quantize',
    'rasters',
    'read_frame_dir',
    'read_mask',
    'read_pnm',
    'split_batches',
    'stitch_masks',
    'write_frame_dir',
    'write_mask',
    'write_pgm',
]
