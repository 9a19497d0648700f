import pytest

from glyphkit.corpus import bundled_corpus_path, load_corpus, record_to_glyph
from glyphkit.model import normalize_glyph


@pytest.fixture(scope="session")
def bundled_records():
    return load_corpus(bundled_corpus_path())


@pytest.fixture(scope="session")
def bundled_glyphs(bundled_records):
    """Normalized bundled glyphs keyed by glyph id."""
    return {
        rec.glyph_id: normalize_glyph(record_to_glyph(rec)) for rec in bundled_records
    }
