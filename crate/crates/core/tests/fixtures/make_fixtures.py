#!/usr/bin/env python3
"""Regenerates the fixture tree under tests/fixtures/root and the cached
download body under tests/fixtures/w3c.html. Needs Pillow and reportlab."""

import json
import os
import zipfile

from PIL import Image, ImageDraw, ImageFont
from reportlab.pdfgen import canvas

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.join(HERE, "root")
STAMP = (2020, 1, 1, 0, 0, 0)


def write(rel, data, mode="w"):
    path = os.path.join(ROOT, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, mode) as f:
        f.write(data)


def font(size):
    for name in ("DejaVuSans-Bold.ttf", "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf"):
        try:
            return ImageFont.truetype(name, size)
        except OSError:
            pass
    return ImageFont.load_default()


def logo():
    img = Image.new("RGB", (1024, 205), "white")
    d = ImageDraw.Draw(img)
    d.rectangle((24, 24, 180, 180), fill=(0, 84, 159))
    d.text((48, 70), "DL", font=font(64), fill="white")
    d.text((210, 40), "Example Research Center", font=font(40), fill=(0, 84, 159))
    d.text((210, 109), "for Applied", font=font(30), fill=(60, 60, 60))
    d.rectangle((600, 109, 787, 144), outline=(255, 255, 255))
    d.text((604, 111), "Artificial", font=font(30), fill=(200, 30, 30))
    d.text((800, 109), "Intelligence", font=font(30), fill=(60, 60, 60))
    img.save(os.path.join(ROOT, "a.png"), optimize=False)


P = "http://schemas.openxmlformats.org/presentationml/2006/main"
A = "http://schemas.openxmlformats.org/drawingml/2006/main"
R = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"


def shape(i, name, text, x, y):
    return (
        f'<p:sp><p:nvSpPr><p:cNvPr id="{i + 2}" name="{name}"/><p:cNvSpPr/><p:nvPr/></p:nvSpPr>'
        f'<p:spPr><a:xfrm><a:off x="{x}" y="{y}"/><a:ext cx="952500" cy="381000"/></a:xfrm>'
        f'<a:prstGeom prst="rect"><a:avLst/></a:prstGeom></p:spPr>'
        f"<p:txBody><a:bodyPr/><a:lstStyle/><a:p><a:r><a:rPr lang=\"de-DE\"/><a:t>{text}</a:t></a:r></a:p></p:txBody></p:sp>"
    )


def slide(shapes):
    body = "".join(shape(i, n, t, x, y) for i, (n, t, x, y) in enumerate(shapes))
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<p:sld xmlns:a="{A}" xmlns:r="{R}" xmlns:p="{P}"><p:cSld><p:spTree>'
        '<p:nvGrpSpPr><p:cNvPr id="1" name=""/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>'
        '<p:grpSpPr><a:xfrm><a:off x="0" y="0"/><a:ext cx="0" cy="0"/></a:xfrm></p:grpSpPr>'
        f"{body}</p:spTree></p:cSld></p:sld>"
    )


def presentation():
    slides = [
        [("Title 1", "Deep Links", 838200, 365125)],
        [("Title 1", "Motivation", 838200, 365125), ("Content 2", "Desktop resources", 838200, 1825625)],
        [("Title 1", "Path segments", 838200, 365125), ("Content 2", "child index line", 838200, 1825625)],
        [
            (
                "Fehler vermeiden" if k == 42 else f"Shape {k + 1}",
                "Fehler vermeiden" if k == 42 else f"Schritt {k + 1}",
                200000 + (k % 8) * 1400000,
                300000 + (k // 8) * 1000000,
            )
            for k in range(48)
        ],
        [("Title 1", "Summary", 838200, 365125)],
    ]
    n = len(slides)
    ctypes = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/ppt/presentation.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.presentation.main+xml"/>'
        + "".join(
            f'<Override PartName="/ppt/slides/slide{i + 1}.xml" ContentType="application/vnd.openxmlformats-officedocument.presentationml.slide+xml"/>'
            for i in range(n)
        )
        + "</Types>"
    )
    rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
        '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="ppt/presentation.xml"/>'
        "</Relationships>"
    )
    pres = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        f'<p:presentation xmlns:a="{A}" xmlns:r="{R}" xmlns:p="{P}"><p:sldIdLst>'
        + "".join(f'<p:sldId id="{256 + i}" r:id="rId{i + 2}"/>' for i in range(n))
        + '</p:sldIdLst><p:sldSz cx="12192000" cy="6858000"/><p:notesSz cx="6858000" cy="9144000"/></p:presentation>'
    )
    pres_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">'
        + "".join(
            f'<Relationship Id="rId{i + 2}" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide" Target="slides/slide{i + 1}.xml"/>'
            for i in range(n)
        )
        + "</Relationships>"
    )
    with zipfile.ZipFile(os.path.join(ROOT, "b.pptx"), "w", zipfile.ZIP_DEFLATED) as z:
        def put(name, text):
            z.writestr(zipfile.ZipInfo(name, STAMP), text, zipfile.ZIP_DEFLATED)

        put("[Content_Types].xml", ctypes)
        put("_rels/.rels", rels)
        put("ppt/presentation.xml", pres)
        put("ppt/_rels/presentation.xml.rels", pres_rels)
        for i, s in enumerate(slides):
            put(f"ppt/slides/slide{i + 1}.xml", slide(s))


def pdf():
    path = os.path.join(ROOT, "docs", "report.pdf")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    c = canvas.Canvas(path, invariant=1)
    c.drawString(72, 720, "First page")
    c.showPage()
    c.drawString(72, 720, "Second page")
    c.showPage()
    c.save()


W3C = """<!DOCTYPE html>
<html lang="en" dir="ltr">
<head>
<meta charset="utf-8">
<title>World Wide Web Consortium (W3C)</title>
<link rel="stylesheet" href="/2008/site/css/minimum" type="text/css" media="all">
<script type="text/javascript">if (a < b && c > d) { document.write("<p>x</p>"); }</script>
</head>
<body id="www-w3-org" class="w3c_public w3c_home">
<div id="w3c_container">
<div id="w3c_mast">
<h1 class="logo"><a tabindex="2" accesskey="1" href="/"><img src="/2008/site/images/logo-w3c-mobile-lg" width="90" height="53" alt="W3C"></a></h1>
<div id="w3c_nav">
<a class="skip" href="#w3c_content_body">Skip</a>
<form action="/Help/search" method="get" enctype="application/x-www-form-urlencoded">
<ul class="main_nav">
<li class="first-item"><a href="/standards/">Standards</a></li>
<li><a href="/participate/">Participate</a></li>
<li><a href="/Consortium/membership">Membership</a></li>
<li class="last-item"><a href="/Consortium/">About W3C</a></li>
</ul>
<div class="search">
<label for="search-form-input">Search</label>
<input id="search-form-input" name="q" type="text" value=""><br>
<button id="search-submit" type="submit">Search</button>
</div>
</form>
</div>
</div>
<div id="w3c_main">
<p class="intro">The World Wide Web Consortium (W3C) is an international community &amp; its members.</p>
<!-- news items -->
<ul class="news"><li>Leading the web to its full potential</li><li>Open standards</li></ul>
</div>
</div>
</body>
</html>
"""


def main():
    os.makedirs(ROOT, exist_ok=True)
    write("c.txt", "line one\nline two\nline three\n")
    write(
        "note.txt",
        "Shopping\nmilk\nbread\ncoffee\nRemember to annotate the logo.\nCall back on Monday.\n",
    )
    logo()
    presentation()
    pdf()
    write(
        "data.json",
        json.dumps(
            {"title": "Fixture", "tags": ["deep", "links"], "owner": {"name": "Ada", "id": 7}},
            indent=2,
        )
        + "\n",
    )
    write(
        "docs/people.ttl",
        "@prefix foaf: <http://xmlns.com/foaf/0.1/> .\n"
        "<http://example.org/ada> a foaf:Person ;\n"
        '    foaf:name "Ada" ;\n'
        "    foaf:knows <http://example.org/grace> .\n",
    )
    write("docs/page.xml", '<?xml version="1.0"?>\n<doc><title>Notes</title><item id="a">one</item><item id="b">two</item></doc>\n')
    with open(os.path.join(HERE, "w3c.html"), "w") as f:
        f.write(W3C)


if __name__ == "__main__":
    main()
