#!/usr/bin/env python3
"""Regenerate the bundled offline POS lexicon (data/lexicons/pos_lexicon_en.tsv).

The lexicon backs the network-free word-class tagger: curated base vocabulary
per class, expanded with regular inflections (plurals, -ed/-ing forms,
comparatives, -ly adverbs). Coverage targets everyday English prose; the
LLM-backed tagger remains the production path for anything rarer.
"""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "emojinize" / "data" / "lexicons" / "pos_lexicon_en.tsv"

NOUNS = """
time year day week month morning evening night hour minute moment season spring summer autumn winter
person people man woman child boy girl friend neighbor family parent mother father brother sister baby
teacher student doctor nurse farmer worker driver writer artist singer player coach chef cook guest visitor
dog cat bird fish horse cow sheep goat rabbit mouse bear wolf fox deer duck chicken bee butterfly spider bat
tree flower plant grass leaf branch root seed garden forest meadow field hill mountain valley river lake ocean
sea beach island stone rock sand soil mud rain snow wind storm cloud sky sun moon star light shadow fire smoke
house home room kitchen bedroom bathroom door window wall floor roof stair table chair bench desk bed couch
lamp candle clock mirror picture painting photo book page letter word story poem song music film movie show
school library museum church market shop store bakery farm office factory hospital station airport harbor
city town village street road path bridge corner square park playground yard fence gate wheel engine
car bus train boat ship plane bicycle truck wagon cart food bread butter cheese milk egg meat soup salad fruit
apple orange banana grape lemon berry cherry peach pear plum potato carrot onion bean pea corn rice pasta cake
cookie pie sugar salt pepper honey tea coffee water juice wine beer bottle cup glass plate bowl spoon fork knife
pot pan oven stove basket bag box jar lid key lock tool hammer nail rope wire brush broom bucket towel soap
clothes shirt dress coat hat shoe sock glove scarf pocket button thread needle wool cotton silk leather
body head face eye ear nose mouth tooth tongue neck shoulder arm elbow hand finger thumb leg knee foot heel
heart blood bone skin hair voice breath sleep dream health illness medicine game ball team goal race prize
winner match rule turn chance luck money coin price cost bill market trade business job work task duty plan
idea thought question answer reason problem solution mistake truth lie fact news message sign signal name
number letter list note mark line circle shape color sound noise smell taste touch feeling emotion joy
sorrow anger fear hope love hate pride shame surprise wonder courage patience kindness wisdom knowledge skill
habit custom tradition culture language country nation border law right duty peace war battle soldier weapon
victory defeat journey trip travel visit walk ride flight arrival departure beginning end middle center edge
side top bottom front back inside outside distance direction north south east west map guide ticket passport
luggage camera memory history future past present age youth childhood life death birth wedding party festival
holiday gift present surprise crowd group pair couple dozen piece part whole half quarter bit slice loaf
weather temperature heat cold ice frost fog mist thunder lightning rainbow sunrise sunset horizon
kettle violin piano drum flute guitar trumpet bell orchestra concert stage audience actor scene curtain
paper pencil pen ink scissors glue tape board chalk screen computer phone radio television machine robot
science experiment laboratory theory result evidence sample measure unit meter liter gram degree
nature animal creature insect snail worm shell nest cave den burrow herd flock swarm
breakfast lunch dinner supper snack meal dish recipe flavor crumb
"""

VERBS = """
be have do say go get make know think take see come want use find give tell work call try ask need feel
become leave put mean keep let begin seem help show hear play run move like live believe bring happen write
sit stand lose pay meet include continue set learn change lead understand watch follow stop create speak read
spend grow open walk win teach offer remember consider appear buy serve die send build stay fall cut reach
kill raise pass sell decide return explain hope develop carry break receive agree support hit produce eat
cover catch draw choose wait sleep wake dream smile laugh cry shout whisper sing dance jump climb swim fly
drive ride travel visit arrive depart enter exit push pull lift drop throw toss fetch hold grab release
touch press rub wash clean cook bake boil fry roast slice chop stir mix pour fill empty weigh measure
plant water harvest pick gather collect store save waste spend borrow lend owe earn count add subtract
repair fix mend paint decorate hang fold wrap tie untie button zip sew knit weave spin polish sweep dust
scrub rinse dry iron wear dress undress listen look stare glance observe notice ignore miss avoid escape
chase hunt trap capture free rescue protect defend attack strike hurt heal cure treat examine test prove
guess wonder doubt trust suspect promise refuse accept reject admit deny confess apologize forgive thank
greet welcome invite join leave quit start finish complete practice train improve succeed fail struggle
strive attempt manage organize arrange prepare pack unpack load unload deliver ship mail post receive
answer reply respond discuss argue debate persuade convince warn advise suggest recommend insist demand
beg request order command obey disobey permit allow forbid prevent delay postpone hurry rush slow
whistle hum breathe sigh yawn sneeze cough shiver tremble sweat blush frown nod shake point wave clap
knock ring buzz echo roar growl bark meow chirp croak hiss crawl slide slip trip stumble wander roam
explore discover invent design sketch trace copy print publish record film photograph celebrate
remain exist occur vanish disappear emerge arise spread shrink expand stretch bend twist turn rotate
pour spill leak drip splash soak float sink dive surface land launch aim shoot score defeat tie
"""

ADJECTIVES = """
good bad great small large big little long short high low old young new ancient modern early late quick slow
fast happy sad angry calm quiet loud bright dark light heavy soft hard smooth rough warm cool hot cold icy
wet dry clean dirty fresh stale sweet sour bitter salty spicy tasty delicious hungry thirsty full empty
open closed free busy easy difficult simple complex clear cloudy sunny rainy windy snowy foggy stormy
strong weak healthy sick tired sleepy awake alive dead rich poor cheap expensive valuable worthless
beautiful pretty ugly handsome plain fancy elegant graceful clumsy neat messy tidy careful careless
brave cowardly bold shy proud humble polite rude kind cruel gentle fierce friendly hostile generous selfish
honest dishonest loyal faithful curious eager keen lazy diligent patient impatient wise foolish clever smart
stupid dull sharp blunt narrow wide broad thick thin deep shallow steep flat round square straight crooked
curly smooth wrinkled tight loose firm solid liquid hollow dense sparse rare common usual unusual strange
odd normal ordinary special unique familiar foreign local distant near close far absent present ready
early punctual prompt sudden gradual steady constant frequent occasional daily weekly monthly annual
true false real fake genuine artificial natural wild tame domestic urban rural public private secret
silent noisy musical rhythmic colorful pale vivid faded golden silver wooden metallic plastic glass
woolen cotton silk leather furry feathered scaly slippery sticky greasy dusty sandy muddy rocky grassy
green blue red yellow purple orange pink brown gray black white crimson scarlet violet turquoise
huge tiny enormous giant massive miniature vast immense slight severe mild harsh soothing painful
joyful cheerful gloomy miserable delighted content anxious nervous worried relaxed comfortable cozy
awkward graceful elegant formal casual serious playful funny humorous witty boring interesting exciting
thrilling terrifying frightening scary spooky mysterious magical wonderful marvelous splendid superb
excellent perfect flawless faulty broken damaged ruined spoiled rotten ripe raw cooked baked fried
frozen melted burnt crispy crunchy chewy tender tough juicy
"""

ADVERBS = """
quickly slowly carefully carelessly quietly loudly softly gently firmly happily sadly angrily calmly
eagerly reluctantly patiently nervously bravely proudly politely rudely kindly cruelly honestly
suddenly gradually steadily constantly frequently occasionally rarely seldom often always never sometimes
usually normally generally typically particularly especially mainly mostly partly completely entirely
fully barely hardly nearly almost quite rather fairly very extremely terribly awfully incredibly
absolutely certainly definitely probably possibly perhaps maybe surely truly really actually finally
eventually immediately instantly promptly soon later earlier yesterday today tomorrow tonight
here there everywhere nowhere somewhere anywhere upstairs downstairs outside inside abroad home
forward backward upward downward sideways ahead behind above below nearby far away apart together
well badly better worse best worst fast hard late early daily weekly monthly yearly once twice
again still yet already just now then afterwards beforehand meanwhile recently lately currently
brightly dimly warmly coldly smoothly roughly tightly loosely deeply shallowly widely narrowly
silently secretly openly publicly privately officially formally casually seriously playfully
gracefully clumsily neatly messily swiftly briskly leisurely wearily sleepily cheerfully gloomily
anxiously comfortably awkwardly strangely oddly normally naturally artificially wildly tamely
"""

VOWELS = set("aeiou")


def inflect_noun(w: str) -> set[str]:
    forms = {w}
    if w.endswith(("s", "x", "z", "ch", "sh")):
        forms.add(w + "es")
    elif w.endswith("y") and w[-2] not in VOWELS:
        forms.add(w[:-1] + "ies")
    elif w.endswith("f"):
        forms.add(w[:-1] + "ves")
    elif w.endswith("fe"):
        forms.add(w[:-2] + "ves")
    else:
        forms.add(w + "s")
    return forms


def inflect_verb(w: str) -> set[str]:
    forms = {w}
    if w.endswith("e") and not w.endswith("ee"):
        stem = w[:-1]
        forms.update({stem + "ing", stem + "ed", w + "s", w + "d"})
    elif w.endswith("y") and w[-2] not in VOWELS:
        forms.update({w[:-1] + "ies", w[:-1] + "ied", w + "ing"})
    else:
        forms.update({w + "s", w + "ed", w + "ing"})
        if len(w) >= 3 and w[-1] not in VOWELS and w[-1] not in "wxy" and w[-2] in VOWELS and w[-3] not in VOWELS:
            forms.update({w + w[-1] + "ed", w + w[-1] + "ing"})  # pat -> patted
    return forms


def inflect_adjective(w: str) -> set[str]:
    forms = {w}
    if len(w) <= 6:
        if w.endswith("e"):
            forms.update({w + "r", w + "st"})
        elif w.endswith("y") and w[-2] not in VOWELS:
            forms.update({w[:-1] + "ier", w[:-1] + "iest"})
        else:
            forms.update({w + "er", w + "est"})
    return forms


IRREGULAR_VERBS = {
    "be": ["am", "is", "are", "was", "were", "been", "being"],
    "have": ["has", "had", "having"],
    "do": ["does", "did", "done", "doing"],
    "go": ["goes", "went", "gone", "going"],
    "say": ["says", "said", "saying"],
    "get": ["gets", "got", "gotten", "getting"],
    "make": ["made"],
    "know": ["knew", "known"],
    "think": ["thought"],
    "take": ["took", "taken"],
    "see": ["saw", "seen"],
    "come": ["came"],
    "find": ["found"],
    "give": ["gave", "given"],
    "tell": ["told"],
    "feel": ["felt"],
    "become": ["became"],
    "leave": ["left"],
    "put": ["putting"],
    "keep": ["kept"],
    "let": ["letting"],
    "begin": ["began", "begun", "beginning"],
    "hear": ["heard"],
    "run": ["ran", "running"],
    "bring": ["brought"],
    "write": ["wrote", "written", "writing"],
    "sit": ["sat", "sitting"],
    "stand": ["stood"],
    "lose": ["lost"],
    "pay": ["paid"],
    "meet": ["met"],
    "set": ["setting"],
    "learn": ["learnt"],
    "lead": ["led"],
    "understand": ["understood"],
    "speak": ["spoke", "spoken"],
    "read": ["reading"],
    "spend": ["spent"],
    "grow": ["grew", "grown"],
    "win": ["won", "winning"],
    "teach": ["taught"],
    "buy": ["bought"],
    "send": ["sent"],
    "build": ["built"],
    "fall": ["fell", "fallen"],
    "cut": ["cutting"],
    "sell": ["sold"],
    "break": ["broke", "broken"],
    "eat": ["ate", "eaten"],
    "catch": ["caught"],
    "draw": ["drew", "drawn"],
    "choose": ["chose", "chosen"],
    "sleep": ["slept"],
    "wake": ["woke", "woken"],
    "sing": ["sang", "sung"],
    "swim": ["swam", "swum", "swimming"],
    "fly": ["flew", "flown"],
    "drive": ["drove", "driven"],
    "ride": ["rode", "ridden"],
    "throw": ["threw", "thrown"],
    "hold": ["held"],
    "wear": ["wore", "worn"],
    "hang": ["hung"],
    "shake": ["shook", "shaken"],
    "hit": ["hitting"],
    "hurt": ["hurting"],
    "strike": ["struck"],
    "shoot": ["shot"],
    "sink": ["sank", "sunk"],
    "dive": ["dove"],
    "slide": ["slid"],
    "quit": ["quitting"],
    "stop": ["stopped", "stopping"],
    "plan": ["planned", "planning"],
    "drop": ["dropped", "dropping"],
    "grab": ["grabbed", "grabbing"],
    "rub": ["rubbed", "rubbing"],
    "stir": ["stirred", "stirring"],
    "chop": ["chopped", "chopping"],
    "zip": ["zipped", "zipping"],
    "knit": ["knitted", "knitting"],
    "spin": ["spun", "spinning"],
    "beg": ["begged", "begging"],
    "nod": ["nodded", "nodding"],
    "clap": ["clapped", "clapping"],
    "trap": ["trapped", "trapping"],
    "trip": ["tripped", "tripping"],
    "slip": ["slipped", "slipping"],
    "wrap": ["wrapped", "wrapping"],
    "hum": ["hummed", "humming"],
}

IRREGULAR_ADJ = {
    "good": ["better", "best"],
    "bad": ["worse", "worst"],
    "far": ["farther", "farthest", "further", "furthest"],
    "little": ["less", "least"],
}


def main() -> None:
    entries: dict[str, str] = {}

    def add(word: str, cls: str) -> None:
        entries.setdefault(word, cls)  # first class wins on ambiguity

    # order matters: prefer the more informative content class for shared
    # surface forms (e.g. "cook" noun vs verb -> verb wins via earlier add)
    for base in VERBS.split():
        for form in sorted(inflect_verb(base)):
            add(form, "verb")
        for form in IRREGULAR_VERBS.get(base, []):
            entries[form] = "verb"
    for base in ADJECTIVES.split():
        for form in sorted(inflect_adjective(base)):
            add(form, "adjective")
        for form in IRREGULAR_ADJ.get(base, []):
            add(form, "adjective")
    for base in ADVERBS.split():
        add(base, "adverb")
    for base in NOUNS.split():
        for form in sorted(inflect_noun(base)):
            add(form, "noun")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as fh:
        for word in sorted(entries):
            fh.write(f"{word}\t{entries[word]}\n")
    print(f"{len(entries)} entries -> {OUT}")


if __name__ == "__main__":
    main()
