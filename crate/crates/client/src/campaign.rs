//! Reliability campaigns and their datasets.
//!
//! Every campaign starts each cell with a forming-reset-set preamble, then
//! cycles states in place: one forming per cell, states reprogrammed for
//! every cycle. A cell reporting a broken high state is recorded and
//! dropped from the rest of the campaign; the campaign itself continues.

use crate::{CellAddress, Client, ClientError, ProgramOverrides};
use memrig_proto::{ProgramResponse, ProgramStatus};
use std::io::Write;
use std::path::Path;

/// The ten stock read voltages, reset polarity first.
pub const DEFAULT_READ_VOLTAGES_MV: [i16; 10] =
    [-300, -250, -200, -150, -100, 100, 150, 200, 250, 300];

pub const DEFAULT_C2C_CYCLES: u32 = 100;
pub const DEFAULT_DISTURB_READS: u32 = 100;
pub const DEFAULT_DISTURB_REPEATS: u32 = 50;

pub const CSV_HEADER: &str = "cell_sl,cell_bl,campaign,voltage_mv,cycle,repeat,read_idx,state,current_na";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CampaignKind {
    CycleToCycle,
    ReadDisturb,
    Endurance,
}

impl CampaignKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CampaignKind::CycleToCycle => "c2c",
            CampaignKind::ReadDisturb => "read_disturb",
            CampaignKind::Endurance => "endurance",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "c2c" => Some(CampaignKind::CycleToCycle),
            "read_disturb" => Some(CampaignKind::ReadDisturb),
            "endurance" => Some(CampaignKind::Endurance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    Lrs,
    Hrs,
    Broken,
}

impl StateLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::Lrs => "lrs",
            StateLabel::Hrs => "hrs",
            StateLabel::Broken => "broken",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "lrs" => Some(StateLabel::Lrs),
            "hrs" => Some(StateLabel::Hrs),
            "broken" => Some(StateLabel::Broken),
            _ => None,
        }
    }
}

/// One measurement record. The position in the dataset is its timestamp
/// ordinal; records are append-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub sl: u8,
    pub bl: u8,
    pub campaign: CampaignKind,
    pub voltage_mv: i16,
    pub cycle: u32,
    pub repeat: u32,
    pub read_idx: u32,
    pub state: StateLabel,
    pub current_na: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<Record>,
}

impl Dataset {
    /// Measurement records only, excluding broken-cell markers.
    pub fn read_records(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.state != StateLabel::Broken)
    }

    pub fn broken_cells(&self) -> Vec<CellAddress> {
        let mut cells: Vec<CellAddress> = self
            .records
            .iter()
            .filter(|r| r.state == StateLabel::Broken)
            .map(|r| CellAddress { sl: r.sl, bl: r.bl })
            .collect();
        cells.sort();
        cells.dedup();
        cells
    }

    pub fn to_csv_string(&self) -> Result<String, ClientError> {
        if self.records.is_empty() {
            return Err(ClientError::Csv("refusing to export an empty dataset".into()));
        }
        let mut out = String::with_capacity(self.records.len() * 40 + 64);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.sl,
                r.bl,
                r.campaign.as_str(),
                r.voltage_mv,
                r.cycle,
                r.repeat,
                r.read_idx,
                r.state.as_str(),
                r.current_na
            ));
        }
        Ok(out)
    }

    pub fn export_csv(&self, path: &Path) -> Result<(), ClientError> {
        let text = self.to_csv_string()?;
        let mut file = std::fs::File::create(path)?;
        file.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn from_csv_string(text: &str) -> Result<Self, ClientError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == CSV_HEADER => {}
            other => return Err(ClientError::Csv(format!("bad header: {other:?}"))),
        }
        let mut records = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(ClientError::Csv(format!("line {}: bad field count", lineno + 2)));
            }
            let parse = |what: &str, s: &str| -> Result<i64, ClientError> {
                s.parse::<i64>()
                    .map_err(|_| ClientError::Csv(format!("line {}: bad {what}", lineno + 2)))
            };
            records.push(Record {
                sl: parse("cell_sl", fields[0])? as u8,
                bl: parse("cell_bl", fields[1])? as u8,
                campaign: CampaignKind::from_str(fields[2])
                    .ok_or_else(|| ClientError::Csv(format!("line {}: bad campaign", lineno + 2)))?,
                voltage_mv: parse("voltage_mv", fields[3])? as i16,
                cycle: parse("cycle", fields[4])? as u32,
                repeat: parse("repeat", fields[5])? as u32,
                read_idx: parse("read_idx", fields[6])? as u32,
                state: StateLabel::from_str(fields[7])
                    .ok_or_else(|| ClientError::Csv(format!("line {}: bad state", lineno + 2)))?,
                current_na: parse("current_na", fields[8])?,
            });
        }
        Ok(Dataset { records })
    }

    pub fn import_csv(path: &Path) -> Result<Self, ClientError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_string(&text)
    }
}

/// Bring a cell into a known low state: form, reset, set.
pub fn preamble(client: &mut Client, cell: CellAddress) -> Result<(), ClientError> {
    let no_overrides = ProgramOverrides::default();
    client.form_cell(cell, &no_overrides)?;
    client.reset_cell(cell, &no_overrides)?;
    client.set_cell(cell, &no_overrides)?;
    Ok(())
}

fn is_broken(resp: &ProgramResponse) -> bool {
    resp.status == ProgramStatus::CellBroken
}

/// Cycle-to-cycle variation: per read voltage, `cycles` repetitions of
/// set-read-reset-read, recording both reads of every cycle.
pub fn run_c2c_campaign(
    client: &mut Client,
    cells: &[CellAddress],
    voltages_mv: &[i16],
    cycles: u32,
) -> Result<Dataset, ClientError> {
    let mut dataset = Dataset::default();
    let no_overrides = ProgramOverrides::default();
    'cells: for &cell in cells {
        preamble(client, cell)?;
        for &v in voltages_mv {
            for cycle in 1..=cycles {
                let set = client.set_cell(cell, &no_overrides)?;
                if is_broken(&set) {
                    push_broken(&mut dataset, CampaignKind::CycleToCycle, cell, v, cycle, 0, &set);
                    continue 'cells;
                }
                let i_na = client.read_cell_na(cell, v)?;
                dataset.records.push(Record {
                    sl: cell.sl,
                    bl: cell.bl,
                    campaign: CampaignKind::CycleToCycle,
                    voltage_mv: v,
                    cycle,
                    repeat: 0,
                    read_idx: 0,
                    state: StateLabel::Lrs,
                    current_na: i_na as i64,
                });
                let reset = client.reset_cell(cell, &no_overrides)?;
                if is_broken(&reset) {
                    push_broken(&mut dataset, CampaignKind::CycleToCycle, cell, v, cycle, 0, &reset);
                    continue 'cells;
                }
                let i_na = client.read_cell_na(cell, v)?;
                dataset.records.push(Record {
                    sl: cell.sl,
                    bl: cell.bl,
                    campaign: CampaignKind::CycleToCycle,
                    voltage_mv: v,
                    cycle,
                    repeat: 0,
                    read_idx: 0,
                    state: StateLabel::Hrs,
                    current_na: i_na as i64,
                });
            }
        }
    }
    Ok(dataset)
}

/// Read disturb: per read voltage and repeat, set then a read burst, reset
/// then a read burst, recording the index of every read within its burst.
pub fn run_read_disturb_campaign(
    client: &mut Client,
    cells: &[CellAddress],
    voltages_mv: &[i16],
    reads: u32,
    repeats: u32,
) -> Result<Dataset, ClientError> {
    let mut dataset = Dataset::default();
    let no_overrides = ProgramOverrides::default();
    'cells: for &cell in cells {
        preamble(client, cell)?;
        for &v in voltages_mv {
            for repeat in 1..=repeats {
                let set = client.set_cell(cell, &no_overrides)?;
                if is_broken(&set) {
                    push_broken(&mut dataset, CampaignKind::ReadDisturb, cell, v, 0, repeat, &set);
                    continue 'cells;
                }
                for read_idx in 1..=reads {
                    let i_na = client.read_cell_na(cell, v)?;
                    dataset.records.push(Record {
                        sl: cell.sl,
                        bl: cell.bl,
                        campaign: CampaignKind::ReadDisturb,
                        voltage_mv: v,
                        cycle: 0,
                        repeat,
                        read_idx,
                        state: StateLabel::Lrs,
                        current_na: i_na as i64,
                    });
                }
                let reset = client.reset_cell(cell, &no_overrides)?;
                if is_broken(&reset) {
                    push_broken(&mut dataset, CampaignKind::ReadDisturb, cell, v, 0, repeat, &reset);
                    continue 'cells;
                }
                for read_idx in 1..=reads {
                    let i_na = client.read_cell_na(cell, v)?;
                    dataset.records.push(Record {
                        sl: cell.sl,
                        bl: cell.bl,
                        campaign: CampaignKind::ReadDisturb,
                        voltage_mv: v,
                        cycle: 0,
                        repeat,
                        read_idx,
                        state: StateLabel::Hrs,
                        current_na: i_na as i64,
                    });
                }
            }
        }
    }
    Ok(dataset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnduranceReport {
    /// Cycles completed before the high state became unprogrammable, or
    /// the full run length if it never did.
    pub n_cmax_observed: u32,
    pub broken: bool,
    /// Resets that missed the target without the cell being broken.
    pub transient_failures: u32,
}

/// Endurance: alternate set/reset until the reset loop reports a broken
/// cell or `max_cycles` is reached. Transient reset misses are counted
/// and cycling continues; only a provably dead high state stops the run.
pub fn run_endurance_campaign(
    client: &mut Client,
    cell: CellAddress,
    max_cycles: u32,
) -> Result<(EnduranceReport, Dataset), ClientError> {
    let mut dataset = Dataset::default();
    let no_overrides = ProgramOverrides::default();
    let verify_mv = client.config.set.v_verify_mv as i16;
    if max_cycles == 0 {
        return Ok((EnduranceReport { n_cmax_observed: 0, broken: false, transient_failures: 0 }, dataset));
    }
    preamble(client, cell)?;
    let mut transient_failures = 0;
    for cycle in 1..=max_cycles {
        let set = client.set_cell(cell, &no_overrides)?;
        dataset.records.push(Record {
            sl: cell.sl,
            bl: cell.bl,
            campaign: CampaignKind::Endurance,
            voltage_mv: verify_mv,
            cycle,
            repeat: 0,
            read_idx: 0,
            state: StateLabel::Lrs,
            current_na: set.final_i_na as i64,
        });
        let reset = client.reset_cell(cell, &no_overrides)?;
        if is_broken(&reset) {
            push_broken(&mut dataset, CampaignKind::Endurance, cell, verify_mv, cycle, 0, &reset);
            return Ok((
                EnduranceReport { n_cmax_observed: cycle, broken: true, transient_failures },
                dataset,
            ));
        }
        if reset.status == ProgramStatus::TargetNotReached {
            transient_failures += 1;
        }
        dataset.records.push(Record {
            sl: cell.sl,
            bl: cell.bl,
            campaign: CampaignKind::Endurance,
            voltage_mv: verify_mv,
            cycle,
            repeat: 0,
            read_idx: 0,
            state: StateLabel::Hrs,
            current_na: reset.final_i_na as i64,
        });
    }
    Ok((
        EnduranceReport { n_cmax_observed: max_cycles, broken: false, transient_failures },
        dataset,
    ))
}

fn push_broken(
    dataset: &mut Dataset,
    campaign: CampaignKind,
    cell: CellAddress,
    voltage_mv: i16,
    cycle: u32,
    repeat: u32,
    resp: &ProgramResponse,
) {
    dataset.records.push(Record {
        sl: cell.sl,
        bl: cell.bl,
        campaign,
        voltage_mv,
        cycle,
        repeat,
        read_idx: 0,
        state: StateLabel::Broken,
        current_na: resp.final_i_na as i64,
    });
}
