"""Vertex class per neighborhood code (values of :class:`cubetti.codes.VertexClass`).

Regenerated and compared by ``cubetti lut``; keep byte-identical to
:func:`cubetti.oracle.generate_classification_table`.
"""

LUT = bytes.fromhex(
    "00000000000000000000000000000000"  # 0x00
    "00000000000005000500000000000500"  # 0x10
    "00000000050000000500000005000000"  # 0x20
    "00000000000005000500000000000500"  # 0x30
    "00000500000000000500050000000000"  # 0x40
    "00000000000005000500000000000500"  # 0x50
    "05000500050000000500050005000000"  # 0x60
    "00000000000005000500000000000500"  # 0x70
    "01000000000000000000000000000000"  # 0x80
    "00000000000005000500000000000500"  # 0x90
    "00000000050000000200000002000000"  # 0xA0
    "00000000000005000200000000000500"  # 0xB0
    "00000500000000000200020000000000"  # 0xC0
    "00000000000005000200000000000500"  # 0xD0
    "02000200020000000400020002000000"  # 0xE0
    "00000000000005000200000000000300"  # 0xF0
)
