"""Write the bundled sample stroke set (src/vtrkit/data/strokes.jsonl).

Medians are hand-placed on a 1024 grid, y down, in standard writing order.
Compound characters are assembled by scaling components into sub-boxes.
This is a small demo set; for real coverage convert a public median dataset
with scripts/convert_medians.py.
"""
import json
from pathlib import Path

H = lambda y, x0=150, x1=874: [(x0, y), (x1, y)]  # noqa: E731
V = lambda x, y0=150, y1=874: [(x, y0), (x, y1)]  # noqa: E731

BASE = {
    "一": [H(512)],
    "二": [H(340, 300, 724), H(700)],
    "三": [H(250, 250, 774), H(512, 300, 724), H(790)],
    "十": [H(450), V(512, 130, 900)],
    "口": [V(250, 250, 800), [(250, 250), (774, 250), (774, 800)], H(780, 250, 774)],
    "日": [V(250, 200, 850), [(250, 200), (774, 200), (774, 850)], H(520, 250, 774), H(830, 250, 774)],
    "目": [V(280, 150, 880), [(280, 150), (744, 150), (744, 880)], H(390, 280, 744), H(620, 280, 744),
          H(860, 280, 744)],
    "田": [V(220, 200, 850), [(220, 200), (804, 200), (804, 850)], H(520, 220, 804), V(512, 200, 830),
          H(830, 220, 804)],
    "中": [V(250, 300, 650), [(250, 300), (774, 300), (774, 650)], H(630, 250, 774), V(512, 100, 950)],
    "木": [H(380), V(512, 100, 950), [(490, 400), (350, 650), (150, 850)], [(534, 400), (700, 650), (880, 830)]],
    "人": [[(520, 120), (450, 500), (150, 880)], [(500, 450), (700, 700), (890, 880)]],
    "大": [H(380), [(512, 120), (450, 600), (150, 900)], [(530, 480), (720, 720), (890, 900)]],
    "天": [H(250, 250, 774), H(480), [(512, 130), (450, 650), (150, 910)], [(540, 560), (720, 760), (890, 910)]],
    "夫": [H(330, 250, 774), H(550), [(512, 120), (450, 650), (150, 910)], [(540, 620), (890, 910)]],
    "王": [H(220, 250, 774), H(520, 300, 724), V(512, 220, 820), H(820)],
    "土": [H(450, 250, 774), V(512, 150, 820), H(820)],
    "士": [H(450), V(512, 150, 820), H(820, 300, 724)],
    "工": [H(220, 250, 774), V(512, 220, 800), H(800)],
    "上": [V(450, 120, 820), H(460, 450, 750), H(820)],
    "下": [H(200), V(512, 200, 920), [(560, 430), (720, 560)]],
    "山": [V(512, 120, 800), [(220, 400), (220, 800), (804, 800)], V(804, 400, 800)],
    "小": [[(512, 100), (512, 850), (430, 800)], [(330, 380), (160, 700)], [(690, 380), (870, 680)]],
    "水": [[(512, 100), (512, 880), (430, 830)], [(180, 380), (400, 380), (150, 780)], [(780, 250), (560, 450)],
          [(560, 450), (880, 880)]],
    "火": [[(250, 350), (320, 530)], [(780, 300), (700, 500)], [(512, 100), (480, 550), (150, 900)],
          [(530, 560), (880, 900)]],
    "月": [[(300, 150), (300, 700), (180, 900)], [(300, 150), (750, 150), (750, 880), (650, 840)], H(380, 300, 750),
          H(600, 300, 750)],
    "石": [H(180), [(450, 180), (150, 650)], V(350, 500, 880), [(350, 500), (800, 500), (800, 880)],
          H(860, 350, 800)],
    "白": [[(520, 80), (440, 220)], V(270, 250, 880), [(270, 250), (754, 250), (754, 880)], H(560, 270, 754),
          H(860, 270, 754)],
    "八": [[(420, 250), (380, 600), (170, 850)], [(600, 250), (700, 600), (880, 850)]],
    "入": [[(400, 150), (520, 300), (480, 600), (150, 880)], [(520, 400), (700, 700), (890, 880)]],
    "又": [[(200, 200), (780, 200), (600, 550), (170, 880)], [(300, 420), (600, 700), (880, 880)]],
    "川": [[(250, 150), (250, 600), (150, 880)], V(512, 200, 780), V(780, 120, 900)],
    "千": [[(700, 100), (300, 220)], H(480), V(512, 240, 920)],
    "干": [H(220, 220, 804), H(500), V(512, 220, 920)],
    "丁": [H(220), [(512, 220), (512, 880), (420, 820)]],
    "七": [[(150, 420), (874, 380)], [(380, 120), (380, 820), (880, 820), (880, 720)]],
    "九": [[(420, 150), (400, 550), (150, 880)], [(180, 380), (620, 380), (620, 820), (900, 820), (900, 700)]],
    "子": [[(250, 200), (740, 200), (512, 420)], [(512, 420), (512, 880), (420, 820)], H(560)],
    "女": [[(450, 120), (300, 500), (700, 800)], [(680, 330), (550, 700), (180, 900)], H(480)],
    "手": [[(720, 120), (300, 200)], H(380, 250, 774), H(580), [(512, 200), (512, 900), (420, 840)]],
    "心": [[(270, 420), (330, 620)], [(400, 300), (400, 820), (800, 820), (800, 650)], [(520, 200), (600, 380)],
          [(760, 360), (860, 560)]],
    "文": [[(512, 80), (560, 220)], H(300), [(700, 300), (500, 650), (150, 900)], [(320, 300), (550, 650), (890, 900)]],
    "方": [[(512, 80), (560, 220)], H(300), [(420, 480), (760, 480), (740, 880), (640, 840)],
          [(420, 300), (380, 650), (180, 880)]],
    "门": [[(250, 120), (320, 260)], V(250, 300, 900), [(400, 150), (800, 150), (800, 900), (700, 860)]],
    "力": [[(200, 330), (780, 330), (760, 880), (640, 840)], [(480, 120), (440, 600), (180, 900)]],
    "国": [V(200, 150, 900), [(200, 150), (824, 150), (824, 900)], H(320, 330, 690), H(520, 360, 660),
          V(512, 320, 720), H(730, 300, 720), [(600, 580), (660, 660)], H(880, 200, 824)],
    "西": [H(180), V(230, 360, 880), [(230, 360), (794, 360), (794, 880)], [(420, 180), (420, 520), (300, 650)],
          [(600, 180), (600, 600), (700, 640)], H(860, 230, 794)],
    "生": [[(340, 120), (200, 420)], H(330, 250, 774), H(560, 250, 774), V(512, 120, 850), H(850)],
    "牛": [[(340, 120), (200, 420)], H(330, 250, 774), H(580), V(512, 120, 920)],
    "本": [H(380), V(512, 100, 950), [(490, 400), (350, 650), (150, 850)], [(534, 400), (700, 650), (880, 830)],
          H(720, 380, 644)],
    "未": [H(250, 280, 744), H(450), V(512, 100, 950), [(490, 470), (150, 850)], [(534, 470), (880, 830)]],
    "正": [H(180, 200, 824), V(512, 180, 850), H(500, 512, 780), V(300, 420, 850), H(850)],
}

# (component, (x0, y0, x1, y1)) placements in em units
COMPOUND = {
    "明": [("日", (80, 200, 420, 800)), ("月", (440, 80, 960, 960))],
    "林": [("木", (60, 80, 500, 960)), ("木", (500, 80, 960, 960))],
    "从": [("人", (60, 120, 500, 920)), ("人", (480, 120, 960, 920))],
    "好": [("女", (60, 100, 500, 940)), ("子", (480, 100, 960, 940))],
    "吕": [("口", (230, 60, 794, 480)), ("口", (180, 520, 844, 960))],
    "昌": [("日", (230, 60, 794, 480)), ("日", (180, 500, 844, 960))],
    "炎": [("火", (200, 40, 824, 500)), ("火", (120, 480, 904, 980))],
    "品": [("口", (260, 60, 764, 480)), ("口", (60, 520, 500, 960)), ("口", (524, 520, 964, 960))],
    "旦": [("日", (230, 80, 794, 700)), ("一", (100, 700, 924, 960))],
    "早": [("日", (230, 40, 794, 520)), ("十", (100, 480, 924, 990))],
    "杏": [("木", (100, 40, 924, 560)), ("口", (260, 520, 764, 980))],
    "呆": [("口", (260, 40, 764, 480)), ("木", (100, 440, 924, 990))],
    "加": [("力", (40, 80, 560, 960)), ("口", (560, 300, 980, 880))],
    "男": [("田", (200, 40, 824, 540)), ("力", (140, 480, 884, 990))],
    "另": [("口", (230, 40, 794, 480)), ("力", (140, 440, 884, 990))],
    "古": [("十", (100, 40, 924, 560)), ("口", (230, 480, 794, 980))],
    "叶": [("口", (60, 300, 400, 800)), ("十", (380, 80, 980, 960))],
    "吉": [("士", (100, 40, 924, 540)), ("口", (230, 500, 794, 980))],
    "村": [("木", (40, 80, 480, 960)), ("丁", (420, 80, 980, 960))],
    "沐": [("水", (40, 120, 380, 900)), ("木", (360, 60, 980, 980))],
}


def place(strokes, box, em=1024.0):
    x0, y0, x1, y1 = box
    sx, sy = (x1 - x0) / em, (y1 - y0) / em
    return [[(round(x0 + x * sx, 2), round(y0 + y * sy, 2)) for x, y in s] for s in strokes]


def build():
    glyphs = dict(BASE)
    for ch, parts in COMPOUND.items():
        glyphs[ch] = [s for comp, box in parts for s in place(BASE[comp], box)]
    return glyphs


CORPUS = """\
大小 上下 山水 日月 人口 工人 女子 男女
明天 白天 十八 三八 大门 人工 手工 天下
小心 文本 方正 生日 古文 国王 中国 西方
火山 石门 木门 品正 水火 牛力 加力 早上
一二三 七八九 十千 天子 大王 土木 上山 下山
日本 白水 川大 又见 村口 林木 吉日 昌明
"""


def main():
    root = Path(__file__).resolve().parents[1] / "src" / "vtrkit" / "data"
    root.mkdir(parents=True, exist_ok=True)
    glyphs = build()
    with open(root / "strokes.jsonl", "w", encoding="utf-8") as fh:
        for ch, strokes in glyphs.items():
            rec = {"character": ch, "strokes": [[list(p) for p in s] for s in strokes]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    (root / "corpus.txt").write_text(CORPUS, encoding="utf-8")
    print(f"wrote {len(glyphs)} glyphs to {root / 'strokes.jsonl'}")


if __name__ == "__main__":
    main()
