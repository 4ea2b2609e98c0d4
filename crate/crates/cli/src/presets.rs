//! Shipped experiment descriptions.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const PRESETS: [Preset; 3] = [
    Preset {
        name: "fig10_11_ldlc",
        summary:
            "LDLC RD-WNC vs point-to-point SER, degree 7, N = 100, L_A = 4, L_B = 2, 1000 codewords",
        text: include_str!("../presets/fig10_11_ldlc.json"),
    },
    Preset {
        name: "fig12_qpsk",
        summary: "QPSK BICM RD-WCN vs point-to-point BER, RA q_A = 2, q_B = 4, 10^4-bit packets",
        text: include_str!("../presets/fig12_qpsk.json"),
    },
    Preset {
        name: "fig14_16qam",
        summary: "16QAM BICM RD-WCN vs point-to-point BER, RA q_A = 2, q_B = 4, 10^4-bit packets",
        text: include_str!("../presets/fig14_16qam.json"),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    PRESETS.iter().find(|p| p.name == name)
}
