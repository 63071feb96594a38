// Parameter draws re-evaluated by bounds_oracle.py (mpmath, 50 digits).
// Shared by the core oracle tests and the solver acceptance suite.

use bipolar_mhd_core::{DomainConstants, PhysicalParams};

/// Inputs: alpha, mu1, korn, d_const, c_tilde, lambda1, f_amp, mu, s_diff, embed, stokes_c.
/// Outputs: delta_prime, gamma_prime, lambda_big, B(n=2), B(n=3).
pub const DRAWS: [([f64; 11], [f64; 5]); 20] = [
    (
        [
            0.0,
            1.84311327461832,
            1.5532719813904978,
            1.442475133256167,
            0.9192330371945769,
            3.013851781563313,
            2.5950113468350215,
            0.7358476179284368,
            0.5016232238483577,
            2.098397615938951,
            1.8223024537394326,
        ],
        [
            1.0000000000000000000,
            1.3865057039044451067,
            28.357038223597066070,
            7.3653878430980998792,
            10.980819297890275339,
        ],
    ),
    (
        [
            0.1268075794921276,
            0.19731471539132905,
            0.7483466253452349,
            1.6373412614895317,
            3.0883157879417924,
            1.1358683775120226,
            0.09305401600088792,
            0.7207397573167003,
            0.5080801198982935,
            1.0430765562496398,
            0.9471317806920538,
        ],
        [
            0.90781670064607176789,
            0.34176460236787453012,
            0.26643787573639132029,
            11.565573784516081449,
            18.871247926026452259,
        ],
    ),
    (
        [
            0.20750183112283538,
            2.922591992197575,
            1.2625199726655425,
            3.704848766216239,
            1.9971362380713038,
            3.774285867013382,
            2.519295371892647,
            0.5685080515303303,
            1.4361601748224049,
            2.8462108022858024,
            1.228559931108637,
        ],
        [
            0.85204866964909171594,
            33160644.603602221392,
            25.968478957469237255,
            0.00082532469782503366482,
            0.00019950317417176589959,
        ],
    ),
    (
        [
            0.3581475714007604,
            1.1623755676596252,
            1.6762038504700574,
            2.764243822732491,
            4.688715389799226,
            2.902767283410099,
            2.45463260706077,
            1.3650391043594865,
            0.783480218119642,
            1.1211702368485257,
            1.926320294139597,
        ],
        [
            0.75346343908750602244,
            871.36182686537973502,
            35.906403106012573762,
            0.39510025462182835602,
            0.32813214043768924695,
        ],
    ),
    (
        [
            0.6669103457605977,
            1.2483158310201903,
            0.23589183872683211,
            2.1924018233395826,
            3.641712848234029,
            1.6590528805788192,
            2.6368589191083514,
            0.3213325774130067,
            1.2264416959168374,
            2.1152065305952705,
            0.3121036740820404,
        ],
        [
            0.57129430628568876765,
            0.36631858656991582083,
            156.69553256062845058,
            195.95846482158554867,
            563.11466041879948666,
        ],
    ),
    (
        [
            0.6309385480616866,
            2.0264701199334643,
            1.441806563826671,
            3.6869119283796636,
            3.570877988640563,
            3.912954437174115,
            2.7368932666824737,
            0.735425395445947,
            1.1068910713040228,
            2.8602755953730705,
            0.6469767861704241,
        ],
        [
            0.59126738035050979393,
            56.542752285377719510,
            40.126686759152640295,
            1.4826919704411384508,
            1.6042096436521756329,
        ],
    ),
    (
        [
            0.3478243666138559,
            2.32704834383105,
            1.4661501594356212,
            2.244468570870318,
            0.4187804776876902,
            3.1833537519799084,
            2.7473543716881474,
            1.7926890801092685,
            1.4989612508047168,
            2.63834742239965,
            1.5878764228016595,
        ],
        [
            0.76000109207395638109,
            2866.0550701762315316,
            28.170230366527252641,
            0.15767579269763367078,
            0.10897277933240936933,
        ],
    ),
    (
        [
            0.25697910986303546,
            1.8918376267924968,
            0.9349592709339573,
            3.1853003131328794,
            3.1695417690897445,
            0.8032124179205482,
            2.5763886484972973,
            0.6972959530468703,
            0.905858365530299,
            1.2525671492194963,
            0.34042538044737713,
        ],
        [
            0.81890037284822132790,
            13362.057376201361980,
            12.056926355569717234,
            0.14995145060843346372,
            0.10259845140646181146,
        ],
    ),
    (
        [
            0.21856346479477196,
            1.5046360593392163,
            1.9656866486954394,
            3.5199822573080923,
            1.0910772985543735,
            1.4976699998904253,
            0.17336788196722253,
            1.778280909846171,
            1.132374043423764,
            2.8973292579464185,
            0.29246217809629893,
        ],
        [
            0.84457021925680228765,
            1810332.2489950484370,
            0.060879020329771101615,
            0.0012428753470179765402,
            0.00032607168551601080206,
        ],
    ),
    (
        [
            0.42863223307870224,
            2.2844106992513145,
            1.596027522940348,
            3.433939076451155,
            4.089705219434138,
            1.8133393250411487,
            2.6696731391856394,
            0.28586532990369795,
            1.4065275219160538,
            0.20745046593922703,
            1.4770180608907089,
        ],
        [
            0.70964021585911291540,
            1415.3344075396523267,
            14.178839719255429196,
            0.031881911578687874685,
            0.016004909529743036186,
        ],
    ),
    (
        [
            0.1671064955283272,
            1.0024213175133614,
            1.8387819564430201,
            2.1544695533853004,
            4.564918973853874,
            2.5898971072722246,
            0.22401195794401196,
            1.2315012492601374,
            0.8797596584642494,
            2.7394185868807144,
            0.3429478549929399,
        ],
        [
            0.87969602237837174292,
            85355205.524226593779,
            0.28203589083017460109,
            0.00030016781414011674379,
            0.000059270275670234867593,
        ],
    ),
    (
        [
            0.9456099887100191,
            1.2700449249889887,
            0.9758438773658963,
            3.2650251407578113,
            1.6335394846961289,
            3.248086049099258,
            1.245270625597223,
            1.130829751556118,
            1.7041840594103332,
            0.44908622255656316,
            0.747034971151916,
        ],
        [
            0.42639432292355149998,
            4.4927186883003374862,
            16.256070719523520999,
            3.8738462236636272566,
            5.0789139211556266782,
        ],
    ),
    (
        [
            0.2954786199589744,
            0.7043634337258339,
            1.4692665018089544,
            2.0389990820262636,
            3.4894058534956582,
            3.2135183810865544,
            1.2709125681118274,
            1.3647382584793706,
            0.9515394400848114,
            0.2730568549764846,
            0.21382417373948404,
        ],
        [
            0.79363513631331042775,
            306.87976474581491463,
            20.062024184243381154,
            1.7010931962011673272,
            1.8917935005007609947,
        ],
    ),
    (
        [
            0.7991656573078412,
            1.122137268041159,
            1.164399801279182,
            1.7166168427389752,
            1.8512213682588352,
            3.0154751154083455,
            1.5808684778373432,
            1.8815202743596284,
            1.076874728449245,
            1.9463443768925988,
            1.6595494053849245,
        ],
        [
            0.50043462903332392231,
            7.5009425842246992355,
            23.070611767818556308,
            5.6048773681990788493,
            7.9118735547498404875,
        ],
    ),
    (
        [
            0.7763966092431492,
            2.3604505715244857,
            1.7187961322043486,
            2.3082103199372006,
            3.1352476845093014,
            0.6095731313943535,
            1.5598713818020793,
            0.202737746168411,
            0.8685062138526904,
            0.996075509225351,
            1.6159328952574232,
        ],
        [
            0.51235418281177391108,
            82.504485845945075112,
            1.4623256900962508912,
            0.11618979552394877142,
            0.075544279744798022350,
        ],
    ),
    (
        [
            0.6909443309515333,
            2.0489479566006628,
            0.6052337352816518,
            1.080752961552383,
            1.426066918376272,
            3.301370060677626,
            0.1263961897508995,
            1.2949774542006498,
            1.2566931232896845,
            0.477778136877117,
            1.57145534984528,
        ],
        [
            0.55812031722957227102,
            10.646846975734699176,
            0.17012498875122333559,
            0.23299853492386604440,
            0.17411004520308822510,
        ],
    ),
    (
        [
            0.8926430216036881,
            0.48917456897483824,
            0.25560165562183723,
            4.132204702953111,
            1.7690975286641026,
            2.2391817442848274,
            2.130866565057904,
            1.5814459642856091,
            0.7780670994883863,
            0.5883668021043105,
            0.9061096410638669,
        ],
        [
            0.45266207794303679323,
            0.044190743286189884448,
            325.26273728682734316,
            1947.2324441011084480,
            8857.3000360828122658,
        ],
    ),
    (
        [
            0.5490896101944873,
            2.0780389108786474,
            1.2480867585027826,
            4.472419500734604,
            2.516342896645681,
            3.782061681982888,
            1.201067557116934,
            0.23321236591958994,
            1.4305342513423362,
            0.882577072195694,
            1.577699835027812,
        ],
        [
            0.63789044144306573800,
            51.649281769197416431,
            8.4144361649943337140,
            0.13380042538550003705,
            0.089484742558976715878,
        ],
    ),
    (
        [
            0.697018924558164,
            2.6415059460652004,
            1.833956662621566,
            1.590677104591676,
            1.0003168988843465,
            2.3703920461276384,
            1.4503521650020623,
            1.2055238303496731,
            1.5855593904434644,
            1.2047917582627237,
            1.7161756902656695,
        ],
        [
            0.55481193342835163171,
            120.07466427780920303,
            4.1170528898240695456,
            0.16977385166821648940,
            0.11908168244728600416,
        ],
    ),
    (
        [
            0.6094624392553125,
            1.8507962291195983,
            0.06975518878360137,
            3.3021975123885032,
            0.7755334998755306,
            3.5336406251237857,
            0.011511821357072627,
            1.6901866757462423,
            1.399433985591834,
            1.7365710375831411,
            1.4297787786668688,
        ],
        [
            0.60334044547256904142,
            0.010187573932950126937,
            0.014508928121075483411,
            86.407510593823364209,
            210.79572155687391031,
        ],
    ),
];

pub fn unpack(row: &[f64; 11]) -> (PhysicalParams, DomainConstants) {
    let p = PhysicalParams {
        eps: 1.0,
        mu0: 1.0,
        mu1: row[1],
        alpha: row[0],
        mu: row[7],
        s_diff: row[8],
        f_amp: row[6],
    };
    let c = DomainConstants {
        korn: row[2],
        embed: row[9],
        d_const: row[3],
        stokes_c: row[10],
        lambda1: row[5],
        c_tilde: row[4],
    };
    (p, c)
}
